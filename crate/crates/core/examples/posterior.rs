//! Parses a small net from text, answers a posterior query, and prints the
//! net back in the same text format.
//!
//! `cargo run --example posterior`

use ctprop::format::{parse_net, print_net};
use ctprop::{Engine, Query};

const NET: &str = "
variable rain { no, yes }
variable sprinkler { off, on }
variable wet { dry, wet }

cpt rain { 0.8, 0.2 }
cpt sprinkler | rain { 0.6, 0.4, 0.99, 0.01 }
cpt wet | sprinkler, rain {
  1.0, 0.0,    # off no
  0.2, 0.8,    # off yes
  0.1, 0.9,    # on no
  0.01, 0.99   # on yes
}
";

fn main() -> ctprop::Result<()> {
    let net = parse_net(NET)?;
    let u = net.universe();
    let rain = u.lookup("rain")?;
    let wet = u.lookup("wet")?;
    let q = Query::new([rain.id], [(wet.id, wet.state_index("wet")?)].into_iter().collect())?;
    let post = Engine::new().posterior(&net, &q)?;
    for (state, p) in rain.states.iter().zip(post.values()) {
        println!("P(rain={state} | wet=wet) = {p:.6}");
    }
    println!("\n{}", print_net(&net)?);
    Ok(())
}
