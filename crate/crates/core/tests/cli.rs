//! End-to-end runs of the command line through `cli::run`.

use std::fs;
use std::path::{Path, PathBuf};

use isokernel::cli::run;

struct Work {
    dir: tempfile::TempDir,
}

impl Work {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn ik(&self, args: &[&str]) -> i32 {
        let mut argv = vec!["ik".to_string()];
        argv.extend(args.iter().map(|a| a.to_string()));
        run(argv)
    }

    fn data(&self) -> PathBuf {
        let p = self.path("g.libsvm");
        if !p.exists() {
            assert_eq!(
                self.ik(&["gen", "--kind", "gaussians", "--d", "3", "--n", "40", "--seed", "2", "--out", s(&p)]),
                0
            );
        }
        p
    }

    fn model(&self) -> PathBuf {
        let m = self.path("m.ikm");
        if !m.exists() {
            let data = self.data();
            assert_eq!(
                self.ik(&["fit", "--input", s(&data), "--psi", "8", "--t", "50", "--seed", "3", "--out", s(&m)]),
                0
            );
        }
        m
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn body(p: &Path) -> Vec<String> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn header(p: &Path) -> Vec<String> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn gen_fit_encode_pipeline() {
    let w = Work::new();
    let data = w.data();
    assert_eq!(body(&data).len(), 80);
    let model = w.model();
    let codes = w.path("c.ikc");
    assert_eq!(w.ik(&["encode", "--model", s(&model), "--input", s(&data), "--out", s(&codes)]), 0);
    let m = isokernel::kernel::io::read_model(std::io::BufReader::new(fs::File::open(&model).unwrap())).unwrap();
    let c = isokernel::kernel::io::read_codes(std::io::BufReader::new(fs::File::open(&codes).unwrap())).unwrap();
    assert_eq!((m.psi(), m.t()), (8, 50));
    assert_eq!(c.len(), 80);
    assert!(c.iter().all(|x| x.t() == 50 && x.psi() == 8));
}

#[test]
fn every_output_has_a_header() {
    let w = Work::new();
    let data = w.data();
    let model = w.model();
    let gram = w.path("gram.csv");
    assert_eq!(w.ik(&["export-gram", "--model", s(&model), "--input", s(&data), "--out", s(&gram)]), 0);
    for p in [&data, &model, &gram] {
        let h = header(p);
        assert!(h.iter().any(|l| l.starts_with("# isokernel ")), "{p:?}: {h:?}");
        assert!(h.iter().any(|l| l.starts_with("# seed:")), "{p:?}: {h:?}");
        assert!(h.iter().any(|l| l.starts_with("# params:")), "{p:?}: {h:?}");
    }
    assert!(header(&model).iter().any(|l| l == "# seed: 3"));
}

#[test]
fn exported_features_and_gram() {
    let w = Work::new();
    let data = w.data();
    let model = w.model();
    let feats = w.path("f.libsvm");
    let gram = w.path("gram.csv");
    assert_eq!(w.ik(&["export-features", "--model", s(&model), "--input", s(&data), "--out", s(&feats)]), 0);
    assert_eq!(w.ik(&["export-gram", "--model", s(&model), "--input", s(&data), "--out", s(&gram)]), 0);
    let rows = body(&feats);
    assert_eq!(rows.len(), 80);
    for r in &rows {
        let values: Vec<f64> = r
            .split_whitespace()
            .skip(1)
            .map(|tok| tok.split_once(':').unwrap().1.parse().unwrap())
            .collect();
        assert_eq!(values.len(), 50);
        assert!((values.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }
    let g: Vec<Vec<f64>> = body(&gram)
        .iter()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(g.len(), 80);
    for (i, row) in g.iter().enumerate() {
        assert_eq!(row.len(), 80);
        assert_eq!(row[i], 1.0);
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, g[j][i]);
            assert!((0.0..=1.0).contains(v));
        }
    }
}

#[test]
fn exit_codes() {
    let w = Work::new();
    let data = w.data();
    let out = w.path("o.csv");
    assert_eq!(w.ik(&["knn", "--input", s(&data), "--k", "0", "--out", s(&out)]), 2);
    assert_eq!(w.ik(&["knn", "--input", s(&data), "--k", "81", "--out", s(&out)]), 2);
    assert_eq!(w.ik(&["knn", "--input", s(&w.path("missing.libsvm")), "--out", s(&out)]), 1);
    assert_eq!(w.ik(&["frobnicate"]), 2);
    assert_eq!(w.ik(&[]), 2);
    assert_eq!(w.ik(&["fit", "--input", s(&data), "--psi", "1", "--out", s(&out)]), 2);
    assert_eq!(w.ik(&["--help"]), 0);
    let bad = w.path("bad.libsvm");
    fs::write(&bad, "0 1:x\n").unwrap();
    assert_eq!(w.ik(&["fit", "--input", s(&bad), "--psi", "2", "--out", s(&out)]), 1);
    assert_eq!(
        w.ik(&["theorem2", "--psi", "4", "--t", "2", "--d", "5", "--trials", "10000", "--out", s(&out)]),
        0
    );
    assert!(!body(&out).is_empty());
}

#[test]
fn knn_rows() {
    let w = Work::new();
    let data = w.data();
    let out = w.path("knn.csv");
    assert_eq!(w.ik(&["knn", "--input", s(&data), "--k", "3", "--metric", "ik", "--out", s(&out)]), 0);
    let rows = body(&out);
    // column header plus three neighbors per point
    assert_eq!(rows.len(), 1 + 80 * 3);
}

/// Runs the same command with one and with four workers, twice each, and
/// requires byte-identical files.
fn same_bytes(w: &Work, args: &[&str], name: &str) {
    let mut outs = Vec::new();
    // One path throughout, since the header records it.
    let out = w.path(name);
    for workers in ["1", "4", "1", "4"] {
        let mut argv = vec!["--workers", workers];
        argv.extend_from_slice(args);
        argv.extend_from_slice(&["--out", s(&out)]);
        assert_eq!(w.ik(&argv), 0, "{argv:?}");
        outs.push(fs::read(&out).unwrap());
    }
    assert!(outs.windows(2).all(|p| p[0] == p[1]), "{name} differs");
}

#[test]
fn workers_do_not_change_output() {
    let w = Work::new();
    let data = w.data();
    same_bytes(&w, &["fit", "--input", s(&data), "--psi", "4", "--t", "30", "--seed", "9"], "fit");
    same_bytes(&w, &["knn", "--input", s(&data), "--metric", "ik", "--k", "4"], "knn");
    same_bytes(
        &w,
        &["instability", "--dims", "5,20", "--n", "30", "--measures", "ik:8,gk:5,lp:2", "--t", "40"],
        "inst",
    );
    same_bytes(&w, &["vary-t", "--d", "10", "--n", "30", "--t-values", "1,5,20", "--trials", "3"], "varyt");
    same_bytes(&w, &["lemma2", "--psi", "3", "--dims", "2", "--trials", "10000"], "lemma2");
    same_bytes(&w, &["theorem2", "--psi", "4", "--t", "2", "--d", "3", "--trials", "10000"], "thm2");
    same_bytes(&w, &["hubness", "--dims", "3", "--n", "60", "--t", "30"], "hub");
    same_bytes(&w, &["cluster-dp", "--input", s(&data), "--k", "2", "--psi-grid", "4,8", "--t", "30"], "dp");
    same_bytes(&w, &["precision", "--input", s(&data), "--psi-grid", "4,8"], "prec");
}

#[test]
fn workers_flag_is_not_in_header() {
    let w = Work::new();
    let data = w.data();
    let out = w.path("a.ikm");
    assert_eq!(w.ik(&["fit", "--input", s(&data), "--psi", "4", "--out", s(&out)]), 0);
    let plain = fs::read(&out).unwrap();
    assert_eq!(w.ik(&["--workers", "3", "fit", "--input", s(&data), "--psi", "4", "--out", s(&out)]), 0);
    assert_eq!(plain, fs::read(&out).unwrap());
}

#[test]
fn ami_of_labels() {
    let w = Work::new();
    let data = w.data();
    let out = w.path("ami.csv");
    assert_eq!(w.ik(&["ami", "--a", s(&data), "--b", s(&data), "--out", s(&out)]), 0);
    let rows = body(&out);
    let v: f64 = rows.last().unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert_eq!(v, 1.0);
}
