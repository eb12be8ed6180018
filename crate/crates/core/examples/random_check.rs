//! Cross-checks the engine against enumeration and variable elimination on
//! seeded random nets, under several reduction strategies.
//!
//! `cargo run --release --example random_check -- [nets] [seed]`

use std::time::Instant;

use ctprop::engine::{FirstCandidate, RandomChoice, SmallestFirst};
use ctprop::oracle::{brute_force_marginal, variable_elimination_marginal};
use ctprop::random::{banded_net, random_net, random_query, NetConfig};
use ctprop::Engine;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ctprop::Result<()> {
    let mut args = std::env::args().skip(1);
    let nets: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut worst = 0.0f64;
    for i in 0..nets {
        let net = random_net(&mut rng, &NetConfig::semi_bayesian(10));
        let q = random_query(&mut rng, &net, 1..=3, 0..=2);
        let want = brute_force_marginal(&net, &q)?;
        let mut engines = [
            Engine::with_strategy(SmallestFirst),
            Engine::with_strategy(FirstCandidate),
            Engine::with_strategy(RandomChoice::new(seed + i as u64)),
        ];
        for engine in &mut engines {
            worst = worst.max(engine.marginal(&net, &q)?.max_rel_diff(&want));
        }
    }
    println!("{nets} random nets x 3 strategies: worst relative difference {worst:.1e}");

    let net = banded_net(&mut rng, 60, 3);
    let q = random_query(&mut rng, &net, 2..=2, 3..=3);
    let start = Instant::now();
    let got = Engine::new().answer(&net, &q)?;
    let elapsed = start.elapsed();
    let want = variable_elimination_marginal(&net, &q, None)?;
    println!(
        "60-variable banded net: {} serial steps in {:.3} s, relative difference to elimination {:.1e}",
        got.stats.serial_steps,
        elapsed.as_secs_f64(),
        got.potential.max_rel_diff(&want)
    );
    Ok(())
}
