use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ktc_cli::format::{emit_instance, parse_instance, read_solution};
use ktc_cli::gen::{generate, PointDistribution};
use ktc_core::{validate, Instance, Point, Solution};
use proptest::prelude::*;

fn ktc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ktc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn solves_the_two_point_sample() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "two.ktc", "KTC 1\nN 2\nK 2\n1 0\n2 0\n");
    let sol = dir.path().join("two.json");
    let o = ktc(&["solve", "--in", p(&inst), "--out", p(&sol)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("cost 4.0"));
    let file = read_solution(&sol).unwrap();
    assert_eq!(file.cost, 4.0);
    let o = ktc(&["validate", "--in", p(&inst), "--solution", p(&sol)]);
    assert!(o.status.success());
}

#[test]
fn missing_file_is_an_input_error() {
    let o = ktc(&["solve", "--in", "/nonexistent/dir/inst.ktc"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/dir/inst.ktc"));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "bad.ktc", "KTC 1\nN 2\nK 2\n1 0\n2 oops\n");
    let o = ktc(&["solve", "--in", p(&inst)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.ktc:5"), "{}", stderr(&o));
}

#[test]
fn exact_base_refuses_thirty_points() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.ktc");
    assert!(ktc(&["gen", "--n", "30", "--k", "3", "--seed", "5", "--out", p(&inst)]).status.success());
    let o = ktc(&["solve", "--in", p(&inst), "--base", "exact", "--eps", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("heuristic"));
    let o = ktc(&["exact", "--in", p(&inst)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn gen_is_deterministic_and_documented() {
    let dir = tempfile::tempdir().unwrap();
    for dist in ["uniform-disk", "clustered", "annulus"] {
        let a = dir.path().join(format!("{dist}-a.ktc"));
        let b = dir.path().join(format!("{dist}-b.ktc"));
        for out in [&a, &b] {
            let o = ktc(&["gen", "--n", "40", "--k", "4", "--seed", "77", "--dist", dist, "--out", p(out)]);
            assert!(o.status.success());
        }
        let ta = fs::read(&a).unwrap();
        assert_eq!(ta, fs::read(&b).unwrap());
        let text = String::from_utf8(ta).unwrap();
        assert!(text.lines().any(|l| l.starts_with('#') && l.contains(dist)));
    }
    let o = ktc(&["gen", "--n", "3", "--k", "1", "--dist", "gaussian"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_zero_points_is_valid() {
    let o = ktc(&["gen", "--n", "0", "--k", "2"]);
    assert!(o.status.success());
    let inst = parse_instance(&stdout(&o)).unwrap();
    assert!(inst.is_empty());
}

#[test]
fn uniform_disk_stays_in_unit_disk() {
    let inst = generate(5000, 3, 3, PointDistribution::UniformDisk).unwrap();
    assert!(inst.points().iter().all(|q| q.norm() <= 1.0));
}

#[test]
fn every_emitted_solution_validates() {
    let dir = tempfile::tempdir().unwrap();
    for (i, dist) in ["uniform-disk", "clustered", "annulus"].iter().enumerate() {
        let inst = dir.path().join(format!("{dist}.ktc"));
        let seed = (i + 10).to_string();
        ktc(&["gen", "--n", "300", "--k", "5", "--seed", &seed, "--dist", dist, "--out", p(&inst)]);
        for extra in [&[][..], &["--global"][..], &["--direct"][..]] {
            let sol = dir.path().join("s.json");
            let mut args = vec!["solve", "--in", p(&inst), "--out", p(&sol), "--eps", "0.3"];
            args.extend_from_slice(extra);
            let o = ktc(&args);
            assert!(o.status.success(), "{}", stderr(&o));
            let o = ktc(&["validate", "--in", p(&inst), "--solution", p(&sol)]);
            assert!(o.status.success(), "{}", stderr(&o));
        }
    }
}

#[test]
fn validate_rejects_a_broken_solution() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "i.ktc", "KTC 1\nN 3\nK 2\n1 0\n2 0\n0 1\n");
    let sol = write(
        dir.path(),
        "s.json",
        r#"{"cost": 4.0, "tours": [[0, 1]], "meta": {"base": "hand"}}"#,
    );
    let o = ktc(&["validate", "--in", p(&inst), "--solution", p(&sol)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("point 2 is not covered"), "{}", stderr(&o));
}

fn tag_count(doc: &roxmltree::Document, tag: &str) -> usize {
    doc.descendants().filter(|n| n.tag_name().name() == tag).count()
}

#[test]
fn render_outputs_well_formed_svg() {
    let dir = tempfile::tempdir().unwrap();
    // farthest point at distance 10, 100 points, k = 3
    let mut pts = vec![Point::new(10.0, 0.0)];
    pts.extend((1..100).map(|i| {
        let a = i as f64 * 0.37;
        let r = 1.0 + 8.0 * (i as f64 / 100.0);
        Point::new(r * a.cos(), r * a.sin())
    }));
    let inst = Instance::at_origin(pts, 3).unwrap();
    let path = write(dir.path(), "i.ktc", &emit_instance(&inst, &[]));
    let sol = dir.path().join("s.json");
    assert!(ktc(&["solve", "--in", p(&path), "--out", p(&sol)]).status.success());
    let svg = dir.path().join("o.svg");
    let o = ktc(&[
        "render", "--in", p(&path), "--solution", p(&sol), "--out", p(&svg), "--show-grid", "--eps", "0.5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let tours = read_solution(&sol).unwrap().tours.len();
    assert_eq!(tag_count(&doc, "path"), tours);
    assert_eq!(tag_count(&doc, "circle"), 36);
    assert_eq!(tag_count(&doc, "line"), 38);
    assert_eq!(tag_count(&doc, "rect"), 100);
    assert_eq!(tag_count(&doc, "polygon"), 1);
}

#[test]
fn render_empty_instance_shows_only_the_depot() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "e.ktc", "KTC 1\nN 0\nK 2\n");
    let svg = dir.path().join("e.svg");
    let o = ktc(&["render", "--in", p(&path), "--out", p(&svg), "--show-grid"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(tag_count(&doc, "polygon"), 1);
    for tag in ["path", "circle", "line", "rect"] {
        assert_eq!(tag_count(&doc, tag), 0, "{tag}");
    }
}

#[test]
fn large_grids_drop_ray_labels() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.ktc");
    ktc(&["gen", "--n", "50", "--k", "5", "--out", p(&path)]);
    let svg = dir.path().join("g.svg");
    // s = ceil(2 pi 5 / 0.1) = 315 rays
    let o = ktc(&["render", "--in", p(&path), "--out", p(&svg), "--show-grid", "--eps", "0.1"]);
    assert!(o.status.success());
    let doc_text = fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&doc_text).unwrap();
    assert_eq!(tag_count(&doc, "text"), 0);
    assert_eq!(tag_count(&doc, "line"), 315);
}

#[test]
fn bench_records_rows_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    let suite = write(
        dir.path(),
        "suite.toml",
        r#"
[[rows]]
n = 8
k = 2
seeds = [1]
strategies = ["exact"]

[[rows]]
n = 9
k = 3
eps = 0.5
dist = "clustered"
seeds = [2]
strategies = ["heuristic"]

[[rows]]
n = 40
k = 3
seeds = [3]
strategies = ["reduced-exact"]
"#,
    );
    let out = dir.path().join("r.json");
    let o = ktc(&["bench", "--in", p(&suite), "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["ratio"].as_f64(), Some(1.0));
    assert!(rows[1]["ratio"].as_f64().unwrap() <= 3.0 - 2.0 / 3.0 + 1e-9);
    assert!(rows[2]["error"].is_string());
    assert!(stdout(&o).contains("reduced-exact"));
}

#[test]
fn reduce_and_lb_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.ktc");
    ktc(&["gen", "--n", "500", "--k", "4", "--seed", "2", "--out", p(&path)]);
    let o = ktc(&["reduce", "--in", p(&path), "--eps", "0.4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 500);
    assert!(v["segment_count"].as_u64().unwrap() >= 1);
    let o = ktc(&["lb", "--in", p(&path)]);
    assert!(stdout(&o).contains("lower_bound"));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        -1e3f64..1e3,
    ]
}

proptest! {
    #[test]
    fn instance_files_round_trip(
        pts in prop::collection::vec((finite(), finite()), 0..20),
        depot in (finite(), finite()),
        k in 1usize..10,
    ) {
        let inst = Instance::new(
            Point::new(depot.0, depot.1),
            pts.iter().map(|&(x, y)| Point::new(x, y)).collect(),
            k,
        ).unwrap();
        let back = parse_instance(&emit_instance(&inst, &["c".into()])).unwrap();
        prop_assert_eq!(back.k(), inst.k());
        prop_assert_eq!(back.origin(), inst.origin());
        for (a, b) in inst.points().iter().zip(back.points()) {
            prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
            prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
        }
    }
}

#[test]
fn solution_json_round_trips_cost() {
    let inst = generate(60, 4, 8, PointDistribution::Clustered).unwrap();
    let s = ktc_core::cover_heuristic(&inst);
    let meta = ktc_cli::format::SolutionMeta {
        base: "heuristic".into(),
        epsilon: None,
        lower_bound: None,
        segment_bases: vec![],
        provenance: None,
    };
    let file = ktc_cli::format::SolutionFile::new(&s, meta);
    let back: ktc_cli::format::SolutionFile = serde_json::from_str(&file.to_json()).unwrap();
    let again = Solution {
        tours: back.tours(),
        cost: back.cost,
    };
    assert!(validate(&inst, &again).is_feasible());
    assert_eq!(back.cost.to_bits(), s.cost.to_bits());
}
