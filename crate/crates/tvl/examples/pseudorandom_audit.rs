// Audits odd cyclic group tables for the seven pseudorandomness properties.

use tvl::constructions::cyclic_graph;
use tvl::pseudorandom::{audit_pseudorandom, AuditConfig, PseudorandomAudit};

pub fn run_example() -> tvl::Result<Vec<PseudorandomAudit>> {
    [7, 9, 11]
        .into_iter()
        .map(|n| audit_pseudorandom(&cyclic_graph(n), n, 1.0, 0.5, &AuditConfig::new(1e-4)))
        .collect()
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for a in run_example()? {
        let marks: Vec<String> = a
            .properties
            .iter()
            .map(|p| format!("{}:{}", p.name, if p.holds { "ok" } else { "FAIL" }))
            .collect();
        println!("Z{:<2} passed {} [{}]", a.n, a.passed, marks.join(" "));
    }
    Ok(())
}
