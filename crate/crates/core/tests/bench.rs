use ails_cvrp::bench::{
    compute_gap, performance_profile, read_gap_matrix, read_rows, round_to, run_experiment, summarize, summary_csv,
    write_rows, ExperimentSpec, Format, GapRow, InstanceSource, PROFILE_SHIFT, QUANTILE_METHOD,
};
use ails_cvrp::engine::RunConfig;
use ails_cvrp::synthetic::SyntheticSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Order statistic at fractional rank `p * (len - 1)`, computed from scratch.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() as f64 - 1.0);
    let below = pos as usize;
    if below + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let w = pos - below as f64;
    sorted[below] * (1.0 - w) + sorted[below + 1] * w
}

#[test]
fn summary_matches_order_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for len in [1usize, 2, 3, 4, 7, 100] {
        let v: Vec<f64> = (0..len).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        let s = summarize(&v).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
        assert!(close(s.min, sorted[0]) && close(s.max, sorted[len - 1]));
        assert!(close(s.q1, quantile(&sorted, 0.25)), "len {len}");
        assert!(close(s.median, quantile(&sorted, 0.5)), "len {len}");
        assert!(close(s.q3, quantile(&sorted, 0.75)), "len {len}");
    }
    let zeros = summarize(&[0.0; 4]).unwrap();
    assert_eq!([zeros.min, zeros.q1, zeros.median, zeros.q3, zeros.max], [0.0; 5]);
    let one = summarize(&[2.5]).unwrap();
    assert_eq!([one.min, one.q1, one.median, one.q3, one.max], [2.5; 5]);
    assert!(summarize(&[]).is_err());
    assert!(summary_csv(&[("gap".into(), one)]).contains(QUANTILE_METHOD));
}

#[test]
fn gap_examples_and_rounding() {
    assert_eq!(round_to(compute_gap(18878.12, 18839.0).unwrap(), 4), 0.2077);
    assert!(compute_gap(1.0, -3.0).is_err());
}

#[test]
fn profile_of_a_toy_matrix() {
    let names: Vec<String> = ["A", "B", "C"].map(String::from).to_vec();
    let gaps = vec![vec![0.0, 0.1, 0.2], vec![0.2, 0.1, 0.1], vec![0.05, 0.05, 0.0]];
    let d = PROFILE_SHIFT;
    let curves = performance_profile(&names, &gaps).unwrap();
    let want = [
        vec![(1.0, 1.0 / 3.0), ((0.2 + d) / (0.1 + d), 2.0 / 3.0), ((0.05 + d) / d, 1.0)],
        vec![(1.0, 1.0 / 3.0), ((0.05 + d) / d, 2.0 / 3.0), ((0.1 + d) / d, 1.0)],
        vec![(1.0, 2.0 / 3.0), ((0.2 + d) / d, 1.0)],
    ];
    for (curve, want) in curves.iter().zip(&want) {
        assert_eq!(curve.points.len(), want.len(), "{}", curve.algorithm);
        for ((t, p), (wt, wp)) in curve.points.iter().zip(want) {
            assert!((t - wt).abs() <= 1e-9 * wt && (p - wp).abs() <= 1e-12, "{}: {t},{p}", curve.algorithm);
        }
    }
    assert!((curves[2].at(1.0) - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(curves[0].at(0.5), 0.0);
}

#[test]
fn profile_edge_cases() {
    let one = performance_profile(&["solo".to_string()], &[vec![0.3], vec![1.2]]).unwrap();
    assert_eq!(one[0].points, vec![(1.0, 1.0)]);
    let names = vec!["best".to_string(), "other".to_string()];
    let curves = performance_profile(&names, &[vec![0.0, 0.5], vec![0.1, 0.2], vec![0.0, 0.0]]).unwrap();
    for tau in [1.0, 1.5, 10.0, 1e6] {
        assert_eq!(curves[0].at(tau), 1.0);
    }
    assert!(performance_profile(&names, &[vec![0.1]]).is_err());
}

#[test]
fn gap_matrix_reader() {
    let (names, rows) = read_gap_matrix("# comment\ninstance,a,b\nx,0.1,0.2\ny,0,0.5\n").unwrap();
    assert_eq!(names, vec!["a", "b"]);
    assert_eq!(rows, vec![vec![0.1, 0.2], vec![0.0, 0.5]]);
    assert!(read_gap_matrix("instance,a\nx,zero\n").is_err());
}

fn experiment(threads: usize) -> Vec<GapRow> {
    let inst = SyntheticSpec::new(30).generate(12);
    let cfg = RunConfig::default().with_virtual_clock(0.01).with_time_limit(2.0);
    let mut spec = ExperimentSpec::new(vec![InstanceSource::Loaded(inst)], cfg);
    spec.runs = 4;
    spec.threads = threads;
    spec.bks = ails_cvrp::instance::load_bks("synthetic-n30-s12,1\n").unwrap();
    run_experiment(&spec)
        .unwrap()
        .iter()
        .map(|r| {
            assert!(r.invalid_runs().is_empty());
            assert_eq!(r.reports.iter().map(|x| x.seed).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
            r.gap_row(&spec.bks).unwrap()
        })
        .collect()
}

#[test]
fn experiments_are_independent_of_thread_count() {
    let (a, b) = (experiment(1), experiment(3));
    assert_eq!(a, b);
    let row = &a[0];
    assert!(row.best as f64 <= row.avg);
    let bks = row.bks.unwrap() as f64;
    assert_eq!(row.gap, Some(round_to(100.0 * (row.avg - bks) / bks, 4)));
}

#[test]
fn csv_and_json_rows_carry_the_same_fields() {
    let rows = experiment(2);
    let extra = GapRow {
        instance: "no-bks".into(),
        bks: None,
        avg: 12.5,
        gap: None,
        best: 12,
        t_min: 0.0001,
    };
    let rows: Vec<GapRow> = rows.into_iter().chain([extra]).collect();
    let csv = write_rows(&rows, Format::Csv).unwrap();
    assert!(csv.starts_with("instance,bks,avg,gap,best,t_min\n"));
    let json = write_rows(&rows, Format::JsonLines).unwrap();
    assert_eq!(read_rows(&csv, Format::Csv).unwrap(), rows);
    assert_eq!(read_rows(&json, Format::JsonLines).unwrap(), rows);
}
