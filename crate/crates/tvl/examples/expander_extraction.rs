// Extracts an expander from dense random graphs and replays the trace.

use tvl::expander::{extract_expander, Extraction, SimpleGraph, Step};

#[derive(Debug, Clone)]
pub struct ExtractionRun {
    pub seed: u64,
    pub d_g: f64,
    pub ex: Extraction,
}

impl ExtractionRun {
    pub fn degree_ok(&self) -> bool {
        let d_h = self.ex.h.average_degree();
        d_h >= self.d_g / 2.0 && self.ex.h.min_degree() as f64 >= d_h / 2.0
    }

    /// Every step shrinks the graph; dense splits keep at most 3/4 of it.
    pub fn trace_ok(&self) -> bool {
        self.ex.trace.iter().all(|s| match *s {
            Step::MinDegree { before, after, .. } => after < before,
            Step::Split {
                before,
                after,
                dense,
                ..
            } => after < before && (!dense || 4 * after <= 3 * before),
        })
    }
}

pub fn run_example() -> tvl::Result<Vec<ExtractionRun>> {
    Ok((0..20)
        .map(|seed| {
            let g = SimpleGraph::gnp(50, 0.3, seed);
            ExtractionRun {
                seed,
                d_g: g.average_degree(),
                ex: extract_expander(&g, seed),
            }
        })
        .collect())
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for r in run_example()? {
        println!(
            "seed {:>2}: d(G) {:.2} -> {} vertices, d(H) {:.2}, min degree {}, {} steps",
            r.seed,
            r.d_g,
            r.ex.h.vertex_count(),
            r.ex.h.average_degree(),
            r.ex.h.min_degree(),
            r.ex.trace.len()
        );
    }
    Ok(())
}
