// Large matchings in Bose triple systems via the tripartite reduction to
// a rainbow matching problem.

use tvl::steiner::{bose_sts, brouwer_pipeline, BrouwerReport, PipelineConfig};

pub fn run_example() -> tvl::Result<Vec<BrouwerReport>> {
    let cfg = PipelineConfig::default();
    [3, 5, 7]
        .into_iter()
        .map(|m| Ok(brouwer_pipeline(&bose_sts(m)?, 50, &cfg)))
        .collect()
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for r in run_example()? {
        println!(
            "STS({}): best matching {} (target {}), balanced split rate {:.3}",
            r.n, r.best_size, r.target, r.acceptance_rate
        );
        println!("  {:?}", r.best);
    }
    Ok(())
}
