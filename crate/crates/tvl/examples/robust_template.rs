// Builds robustly matchable templates and re-checks every subset.

use tvl::absorption::{build_template, RobustTemplate};

pub fn run_example() -> tvl::Result<Vec<RobustTemplate>> {
    [9, 12]
        .into_iter()
        .map(|h| build_template(h, 0, 400))
        .collect()
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for t in run_example()? {
        let (deficiency, checked) = t.deficiency();
        println!(
            "h {:>2}: {} edges, max degree {}, {} subsets checked, deficiency {}",
            t.h,
            t.edge_count(),
            t.max_degree,
            checked,
            deficiency
        );
    }
    Ok(())
}
