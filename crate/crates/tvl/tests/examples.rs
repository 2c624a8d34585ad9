//! Every example under `examples/` runs and produces what it claims.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }
    };
}

example!(absorber);
example!(addition_steps);
example!(cli_harness);
example!(colour_classes);
example!(cyclic_parity);
example!(distributive_absorber);
example!(edge_switchers);
example!(exhaustive_small_orders);
example!(expander_extraction);
example!(four_cycles);
example!(hall_paige);
example!(maillet_blowup);
example!(nibble_and_augment);
example!(parallel_solver);
example!(pseudorandom_audit);
example!(rare_colours);
example!(robust_template);
example!(steiner_brouwer);
example!(switcher_bounds);
example!(transversal_counts);

#[test]
fn absorber_targets_all_absorb() {
    let r = absorber::run_example().unwrap();
    assert_eq!(r.checks, vec![true; 5]);
    assert!(r.validated);
    assert_eq!((r.absorber.vertices.len(), r.absorber.order), r.cost);
}

#[test]
fn addition_ledgers() {
    let rows = addition_steps::run_example().unwrap();
    assert_eq!(rows.len(), 6);
    for l in &rows {
        assert_eq!(l.m_id, 20 + l.step);
        assert_eq!(l.m_rb, 60);
        assert_eq!(l.vertices, 2 * (l.m_id + l.m_rb) + 2);
        assert!(l.colours_unchanged);
    }
}

#[test]
fn cli_calls() {
    let codes: Vec<i32> = cli_harness::run_example()
        .unwrap()
        .iter()
        .map(|r| r.1)
        .collect();
    assert_eq!(codes, vec![0, 0, 0, 0, 0, 1]);
}

#[test]
fn colour_classes_cover_pairs() {
    let (family, passed, trials) = colour_classes::run_example().unwrap();
    assert!(!family.classes.is_empty());
    assert!(family
        .classes
        .iter()
        .all(|c| c.colours.windows(2).all(|w| w[0] < w[1])));
    assert!(passed <= trials);
}

#[test]
fn cyclic_parity_table() {
    for r in cyclic_parity::run_example().unwrap() {
        assert!(r.optimal);
        assert_eq!(r.max, if r.n % 2 == 0 { r.n - 1 } else { r.n }, "Z{}", r.n);
    }
}

#[test]
fn distributive_absorbs_every_choice() {
    let r = distributive_absorber::run_example().unwrap();
    assert_eq!(r.choices, 3);
    assert_eq!(r.absorber.ledger_gap(), 0);
}

#[test]
fn edge_switcher_is_robust() {
    let (s, r) = edge_switchers::run_example().unwrap();
    assert_eq!(s.order, 3);
    assert!(r.all_pass());
}

#[test]
fn small_orders() {
    let s = exhaustive_small_orders::run_example().unwrap();
    assert_eq!((s[0].squares, s[1].squares), (576, 161_280));
    assert_eq!(s[0].min_max_transversal, 3);
    assert_eq!(s[1].without_full, 0);
}

#[test]
fn extraction_runs() {
    for r in expander_extraction::run_example().unwrap() {
        assert!(r.degree_ok() && r.trace_ok(), "seed {}", r.seed);
    }
}

#[test]
fn four_cycle_bound() {
    for r in four_cycles::run_example().unwrap() {
        assert!(r.count as f64 >= r.bound, "{r:?}");
    }
}

#[test]
fn hall_paige_agrees() {
    let rows = hall_paige::run_example().unwrap();
    // groups of orders 1..=16 in invariant-factor form
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r.has_complete_mapping == r.sylow_test));
}

#[test]
fn blowups_stop_one_short() {
    for r in maillet_blowup::run_example().unwrap() {
        assert_eq!((r.order, r.latin, r.max, r.optimal), (6, true, 5, true));
    }
}

#[test]
fn nibble_then_augment() {
    let (nibble, augmented) = nibble_and_augment::run_example().unwrap();
    assert!(nibble >= 90);
    assert!(augmented >= nibble);
}

#[test]
fn parallel_matches_sequential() {
    for (name, s, p, opt) in parallel_solver::run_example().unwrap() {
        assert_eq!(s, p, "{name}");
        assert!(opt);
    }
}

#[test]
fn odd_tables_audit_clean() {
    assert!(pseudorandom_audit::run_example()
        .unwrap()
        .iter()
        .all(|a| a.passed));
}

#[test]
fn rare_colour_floor() {
    assert!(rare_colours::run_example()
        .unwrap()
        .iter()
        .all(|(_, m)| m.len() >= 9));
}

#[test]
fn templates_match_every_subset() {
    let ts = robust_template::run_example().unwrap();
    assert_eq!(
        ts.iter().map(|t| t.deficiency()).collect::<Vec<_>>(),
        vec![(0, 20), (0, 70)]
    );
}

#[test]
fn steiner_matchings() {
    let sizes: Vec<usize> = steiner_brouwer::run_example()
        .unwrap()
        .iter()
        .map(|r| r.best_size)
        .collect();
    assert_eq!(sizes[0], 3);
    assert!(sizes[1] >= 4 && sizes[2] >= 6);
}

#[test]
fn switcher_bounds_hold() {
    assert!(switcher_bounds::run_example()
        .unwrap()
        .iter()
        .all(|(_, _, r)| r.holds));
}

#[test]
fn transversal_count_table() {
    let counts = transversal_counts::run_example().unwrap();
    assert_eq!(counts, vec![(1, 1), (3, 3), (5, 15), (7, 133), (9, 2025)]);
}
