use num_bigint::BigUint;
use sawtm::oracle::dfs_count;
use sawtm::tm::engine::{SweepOptions, Sweeper, DEFAULT_MEMORY_LIMIT};
use sawtm::tm::{reference_sweep, sweep, PathKind};
use sawtm::{generate_primes, golden, ProblemSpec};

#[test]
fn in_place_matches_double_buffered() {
    let primes = generate_primes(2);
    for problem in ProblemSpec::all() {
        for size in 1..=8 {
            for &p in &primes {
                assert_eq!(
                    sweep(&problem, size, p, 1).unwrap(),
                    reference_sweep(&problem, size, p).unwrap(),
                    "{} L={size} p={p}",
                    problem.id()
                );
            }
        }
    }
}

#[test]
fn sweep_matches_brute_force() {
    let p = generate_primes(1)[0];
    for problem in ProblemSpec::all() {
        for size in 1..=5 {
            let expected = dfs_count(&problem, size).unwrap() % p;
            assert_eq!(BigUint::from(sweep(&problem, size, p, 1).unwrap()), expected, "{} L={size}", problem.id());
        }
    }
}

#[test]
fn worker_count_does_not_change_residues() {
    let p = generate_primes(3)[2];
    for id in ["hex-rhombus-saw", "hex-triangle-sap-top", "sq-saw-spanning", "hex-square-saw"] {
        let problem: ProblemSpec = id.parse().unwrap();
        let sizes = if problem.lattice == sawtm::tm::Lattice::Square { 7 } else { 9 };
        let one = sweep(&problem, sizes, p, 1).unwrap();
        for workers in [2, 8] {
            assert_eq!(sweep(&problem, sizes, p, workers).unwrap(), one, "{id} workers={workers}");
        }
    }
}

#[test]
fn in_place_order_is_safe() {
    let p = generate_primes(1)[0];
    let opts = SweepOptions { check_order: true, ..SweepOptions::default() };
    for problem in ProblemSpec::all() {
        for size in [3, 6] {
            let sweeper = Sweeper::new(problem, size, DEFAULT_MEMORY_LIMIT).unwrap();
            let counts = sweeper.run(p, &opts).unwrap_or_else(|e| panic!("{} L={size}: {e}", problem.id()));
            assert_eq!(sweeper.accepted(&counts), sweep(&problem, size, p, 1).unwrap());
        }
    }
}

#[test]
fn spanning_walks_include_crossing_walks() {
    let pairs = [("sq-saw-spanning", "sq-saw-crossing"), ("hex-rhombus-span", "hex-rhombus-saw")];
    for (span, cross) in pairs {
        let (span, cross): (ProblemSpec, ProblemSpec) = (span.parse().unwrap(), cross.parse().unwrap());
        assert_eq!(span.path, PathKind::SawSpanning);
        for size in 1..=5 {
            assert!(dfs_count(&span, size).unwrap() >= dfs_count(&cross, size).unwrap());
        }
    }
}

#[test]
fn bundled_tables_to_size_eight() {
    let p = generate_primes(1)[0];
    for id in golden::ids() {
        let problem: ProblemSpec = id.parse().unwrap();
        for entry in golden::series(id).unwrap().entries.iter().take(8) {
            let expected = &entry.value % p;
            assert_eq!(BigUint::from(sweep(&problem, entry.size, p, 1).unwrap()), expected, "{id} L={}", entry.size);
        }
    }
}

#[test]
fn square_crossing_small_values() {
    // the square-lattice crossing walks have no bundled table; these come from the oracle
    let problem: ProblemSpec = "sq-saw-crossing".parse().unwrap();
    let brute: Vec<BigUint> = (1..=4).map(|l| dfs_count(&problem, l).unwrap()).collect();
    assert_eq!(brute, [2u32, 12, 184, 8512].map(BigUint::from));
    let p = generate_primes(1)[0];
    for (l, v) in (1..=4).zip(&brute) {
        assert_eq!(BigUint::from(sweep(&problem, l, p, 1).unwrap()), v % p);
    }
}

#[test]
fn sizes_outside_the_signature_word_are_rejected() {
    let problem: ProblemSpec = "hex-rhombus-saw".parse().unwrap();
    assert!(Sweeper::new(problem, problem.max_size() + 1, DEFAULT_MEMORY_LIMIT).is_err());
    assert!(Sweeper::new(problem, 0, DEFAULT_MEMORY_LIMIT).is_err());
}
