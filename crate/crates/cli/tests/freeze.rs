//! Maintenance helpers, all `#[ignore]`: print the values frozen into the
//! corpus checks, and regenerate the corpus JSON files after a schema or
//! builder change. Run explicitly with `--ignored` when refreshing.

use shatterlab_cli::corpus;
use shatterlab_core::families::{forced_density_estimate, shatter_lower, Strategy};
use shatterlab_core::pipeline::theorem_exponent;
use shatterlab_core::simple;

fn task_seed(seed: u64, t: usize) -> u64 {
    seed.wrapping_add((t as u64) << 32)
}

#[test]
#[ignore]
fn print_frozen_values() {
    let diag = [Strategy::Diagonal];

    let s3 = corpus::triples_s3();
    let counts: Vec<usize> = (3..=9)
        .map(|t| shatter_lower(&s3, t, &diag, task_seed(0, t)).unwrap().count)
        .collect();
    println!("s3 diagonal counts t=3..9: {counts:?}");

    for seed in [101u64, 202, 303] {
        let fam = corpus::random_simple_family(seed);
        println!("seed {seed}: {fam:?}");
        let (s, _) = simple::exponent(&fam).unwrap();
        let pf = simple::as_param_family(&fam);
        let counts: Vec<usize> = [4usize, 6]
            .iter()
            .map(|&t| shatter_lower(&pf, t, &diag, task_seed(0, t)).unwrap().count)
            .collect();
        println!("seed {seed}: exponent {s}, diagonal counts t=4,6: {counts:?}");
    }

    let forced = corpus::forced_example();
    let suite = [Strategy::Diagonal, Strategy::Grid];
    let ts: Vec<usize> = (3..=9).collect();
    for j in [vec!["1"], vec!["1", "2"], vec!["1", "3"], vec!["1", "2", "3"]] {
        let est = forced_density_estimate(&forced, &ts, &j, &suite, 0).unwrap();
        println!("forced {j:?}: slope {:.4} counts {:?}", est.slope, est.counts);
    }
    let (s, _) = theorem_exponent(&forced).unwrap();
    println!("forced-example exponent: {s}");

    let (s, _) = theorem_exponent(&corpus::empty_family()).unwrap();
    println!("empty exponent: {s}");
    let t5 = shatter_lower(
        &corpus::empty_family(),
        5,
        &Strategy::default_suite(),
        task_seed(0, 5),
    )
    .unwrap();
    println!("empty count t=5: {}", t5.count);

    let (s, _) = theorem_exponent(&corpus::cross_plus_points()).unwrap();
    println!("cross-plus-points exponent: {s}");
    let (s, _) = theorem_exponent(&corpus::quadrant_pq()).unwrap();
    println!("quadrant-PQ exponent: {s}");
}

#[test]
#[ignore]
fn regenerate_corpus_files() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("corpus");
    corpus::write_files(&dir).unwrap();
    println!("wrote corpus files to {}", dir.display());
}

#[test]
#[ignore]
fn probe_cross_stages() {
    use shatterlab_core::pipeline::{complexity, reduce_to_simple};
    let f = corpus::cross_plus_points();
    let t0 = std::time::Instant::now();
    let c = complexity(&f).unwrap();
    println!("complexity {:?} in {} ms", c, t0.elapsed().as_millis());
    let t1 = std::time::Instant::now();
    let (simple, trace) = reduce_to_simple(&f).unwrap();
    println!(
        "reduce: {} steps, {} indices, {} dropped in {} ms",
        trace.steps.len(),
        simple.indices.len(),
        trace.dropped.len(),
        t1.elapsed().as_millis()
    );
    let t2 = std::time::Instant::now();
    let (s, _) = simple::exponent(&simple).unwrap();
    println!("exponent {s} in {} ms", t2.elapsed().as_millis());
}

#[test]
#[ignore]
fn probe_quadrant_stages() {
    use shatterlab_core::pipeline::{complexity, reduce_to_simple};
    let f = corpus::quadrant_pq();
    let t0 = std::time::Instant::now();
    let c = complexity(&f).unwrap();
    println!("complexity {:?} in {} ms", c, t0.elapsed().as_millis());
    let t1 = std::time::Instant::now();
    let (simple, trace) = reduce_to_simple(&f).unwrap();
    println!(
        "reduce: {} steps, {} indices, {} dropped in {} ms",
        trace.steps.len(),
        simple.indices.len(),
        trace.dropped.len(),
        t1.elapsed().as_millis()
    );
    let t2 = std::time::Instant::now();
    let (s, _) = simple::exponent(&simple).unwrap();
    println!("exponent {s} in {} ms", t2.elapsed().as_millis());
}

#[test]
#[ignore]
fn probe_cross_window() {
    use shatterlab_core::pipeline::{synth_uniform_closure, window1_search};
    let f = corpus::cross_plus_points();
    let t0 = std::time::Instant::now();
    let parts = synth_uniform_closure(&f, "1").unwrap();
    println!("closure in {} ms, len {}", t0.elapsed().as_millis(), parts[0].len());
    let ann = &parts[0];
    let others: Vec<_> = ann.flats[1..].to_vec();
    let t1 = std::time::Instant::now();
    let cert = window1_search(2, 2, f.relation(0), f.param_set(), &ann.flats[0], &others);
    println!(
        "window1[0] in {} ms: {:?}",
        t1.elapsed().as_millis(),
        cert.as_ref().map(|c| (c.center.clone(), c.radius.clone()))
    );
}
