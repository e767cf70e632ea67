use ddl_core::data::gen_gaussian_classes;
use ddl_core::neural::{select_lambda_nn, NnSelectConfig};
use ddl_core::rng::tags;
use ddl_core::{spearman, Seed};

#[test]
fn ddl_score_tracks_test_error_across_the_grid() {
    let cfg = NnSelectConfig::default();
    let trials = 11u64;
    let tracking = (0..trials)
        .filter(|&t| {
            let seed = Seed(4_000).derive(t);
            let data = gen_gaussian_classes(2000, 10, 2.0, seed.derive(tags::DATA)).unwrap();
            let test = gen_gaussian_classes(10_000, 10, 2.0, seed.derive(tags::TEST_DATA)).unwrap();
            let r = select_lambda_nn(&data, &test, &cfg, seed).unwrap();
            spearman(&r.method("ddl").unwrap().scores, &r.oracle_error).is_some_and(|rho| rho >= 0.5)
        })
        .count();
    assert!(2 * tracking > trials as usize, "{tracking} of {trials}");
}
