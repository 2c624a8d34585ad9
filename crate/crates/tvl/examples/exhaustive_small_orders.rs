// Walks every Latin square of order 4 and 5 and records the smallest
// maximum transversal and how many squares lack a full one.

use tvl::latin::for_each_latin_square;
use tvl::solvers::max_transversal_at_least;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderSummary {
    pub n: usize,
    pub squares: u64,
    pub min_max_transversal: usize,
    pub without_full: u64,
}

pub fn summarise(n: usize) -> OrderSummary {
    let mut s = OrderSummary {
        n,
        squares: 0,
        min_max_transversal: n,
        without_full: 0,
    };
    for_each_latin_square(n, |cells| {
        s.squares += 1;
        // only sizes n-1 and n matter; anything smaller shows up as < n-1
        let best = max_transversal_at_least(cells, n, n - 1);
        s.min_max_transversal = s.min_max_transversal.min(best);
        if best < n {
            s.without_full += 1;
        }
    });
    s
}

pub fn run_example() -> tvl::Result<Vec<OrderSummary>> {
    Ok(vec![summarise(4), summarise(5)])
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for s in run_example()? {
        println!(
            "order {}: {} squares, every one has a transversal of size >= {}, {} without a full transversal",
            s.n, s.squares, s.min_max_transversal, s.without_full
        );
    }
    Ok(())
}
