// Complete mappings of every abelian group up to order 16, compared
// with the Sylow 2-subgroup test.

use tvl::constructions::{abelian_groups_of_order, complete_mapping_exists, COMPLETE_MAPPING_CAP};

#[derive(Debug, Clone)]
pub struct GroupRow {
    pub label: String,
    pub order: usize,
    pub has_complete_mapping: bool,
    pub sylow_test: bool,
}

pub fn run_example() -> tvl::Result<Vec<GroupRow>> {
    let mut rows = Vec::new();
    for n in 1..=COMPLETE_MAPPING_CAP {
        for g in abelian_groups_of_order(n) {
            let (found, t) = complete_mapping_exists(&g, COMPLETE_MAPPING_CAP)?;
            assert_eq!(found, t.is_some());
            rows.push(GroupRow {
                label: g.label(),
                order: n,
                has_complete_mapping: found,
                sylow_test: g.sylow2_trivial_or_noncyclic(),
            });
        }
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for r in run_example()? {
        println!(
            "{:<10} complete mapping {:<5} sylow test {}",
            r.label, r.has_complete_mapping, r.sylow_test
        );
    }
    Ok(())
}
