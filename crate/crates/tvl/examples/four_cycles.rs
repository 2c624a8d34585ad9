// Labelled 4-cycle counts of random graphs against the lower bound
// 16 e^4 / n^4 - 6 n^3.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvl::expander::{c4_lower_bound, SimpleGraph};

#[derive(Debug, Clone)]
pub struct C4Row {
    pub n: usize,
    pub edges: usize,
    pub count: u64,
    pub bound: f64,
}

pub fn run_example() -> tvl::Result<Vec<C4Row>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    Ok((0..500)
        .map(|_| {
            let n = rng.gen_range(1..=30);
            let g = SimpleGraph::gnp(n, rng.gen_range(0.0..=1.0), rng.gen());
            C4Row {
                n,
                edges: g.edge_count(),
                count: g.labelled_c4_count(),
                bound: c4_lower_bound(n, g.edge_count()),
            }
        })
        .collect())
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    let rows = run_example()?;
    let held = rows.iter().filter(|r| r.count as f64 >= r.bound).count();
    println!("bound held on {held} of {} graphs", rows.len());
    for r in rows.iter().filter(|r| r.bound > 0.0).take(5) {
        println!(
            "n {:>2} e {:>3}: {} labelled C4 >= {:.1}",
            r.n, r.edges, r.count, r.bound
        );
    }
    Ok(())
}
