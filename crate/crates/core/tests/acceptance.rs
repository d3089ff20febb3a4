//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use xspectra::models::{
    energy, potential, pseudo_hermiticity_residual, pt_symmetry_residual, quasi_hermiticity_residual, Branch,
    PotentialModel,
};
use xspectra::numerics::{discretize, eigen_near_shift, gram_matrix, lowest_eigenvalues, schrodinger_residual, Quadrature};
use xspectra::pct::{gauge_energy, pct_e_minus_v, pct_extract_potential, GMap, MapKind};
use xspectra::polycore::count_real_roots_in;
use xspectra::xop::{x1_laguerre_norm, x1_ode_coefficients, x1_polynomial, X1Family};

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail, notes: Vec::new() }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn radial_fig() -> PotentialModel {
    PotentialModel::radial(2.0, 1.75, 1.2).unwrap()
}

fn scarf_fig(branch: Branch) -> PotentialModel {
    PotentialModel::scarf(1.75, 3.0, 1.25, 1.0, branch).unwrap()
}

fn max_coeff_err(got: &[f64], want: &[f64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0_f64;
    for a in [0.5, 2.0] {
        let fam = X1Family::Laguerre { a };
        let l1 = x1_polynomial(fam, 1).unwrap();
        let l2 = x1_polynomial(fam, 2).unwrap();
        worst = worst.max(max_coeff_err(l1.coeffs(), &[-a - 1.0, -1.0]));
        worst = worst.max(max_coeff_err(l2.coeffs(), &[-a * (a + 2.0), 0.0, 1.0]));
    }
    for (a, b) in [(1.75, 3.0), (0.5, 1.5)] {
        let fam = X1Family::Jacobi { a, b };
        let p1 = x1_polynomial(fam, 1).unwrap();
        let p2 = x1_polynomial(fam, 2).unwrap();
        worst = worst.max(max_coeff_err(p1.coeffs(), &[-(2.0 + a + b) / (2.0 * (a - b)), -0.5]));
        let c = -(a + b + 2.0) / 4.0;
        worst = worst.max(max_coeff_err(p2.coeffs(), &[c, -(a * a + b * b + 2.0 * (a + b)) / (2.0 * (a - b)), c]));
    }
    Outcome::new(worst <= 1e-12, format!("max coefficient error {worst:.2e} (tol 1e-12)"))
}

fn criterion_2() -> Outcome {
    let mut ratio = 0.0_f64;
    let mut norm_err = 0.0_f64;
    for a in [0.5, 2.0] {
        let g = gram_matrix(X1Family::Laguerre { a }, 6, &Quadrature::semi_infinite_exp(0.0)).unwrap();
        ratio = ratio.max(g.max_offdiag_ratio);
        for (i, d) in g.diagonal().iter().enumerate() {
            norm_err = norm_err.max((d / x1_laguerre_norm(i + 1, a).unwrap() - 1.0).abs());
        }
    }
    Outcome::new(
        ratio <= 1e-8 && norm_err <= 1e-8,
        format!("off-diagonal ratio {ratio:.2e}, norm rel err {norm_err:.2e} (tol 1e-8)"),
    )
}

fn criterion_3() -> Outcome {
    let mut mismatches = Vec::new();
    for a in [0.5, 2.0, 5.0] {
        for n in 1..=8 {
            let p = x1_polynomial(X1Family::Laguerre { a }, n).unwrap();
            let below = count_real_roots_in(&p, f64::NEG_INFINITY, -a).unwrap();
            let positive = count_real_roots_in(&p, 0.0, f64::INFINITY).unwrap();
            if below != 1 || positive != n - 1 {
                mismatches.push(format!("a={a} n={n}: {below} below -a, {positive} positive"));
            }
        }
    }
    let detail = if mismatches.is_empty() {
        "24 polynomials: 1 zero in (-inf,-a), n-1 in (0,inf)".to_string()
    } else {
        mismatches.join("; ")
    };
    Outcome::new(mismatches.is_empty(), detail)
}

fn criterion_4() -> Outcome {
    let cases = [
        (
            GMap::real_shift(MapKind::Quadratic, 1.75, 0.0).unwrap(),
            radial_fig().hermitian(),
            linspace(0.2, 5.0, 50),
        ),
        (
            GMap::real_shift(MapKind::Sine, 1.25, 0.0).unwrap(),
            scarf_fig(Branch::Sin).hermitian(),
            linspace(-1.2, 1.2, 50),
        ),
    ];
    let (mut v_err, mut e_err, mut drift) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (gm, model, grid) in cases {
        let fam = model.x1_family();
        let ext = pct_extract_potential(&gm, fam, (1, 2), &grid).unwrap();
        for (x, v) in grid.iter().zip(&ext.v) {
            let exact = potential(&model, *x).unwrap();
            v_err = v_err.max((v - exact).norm() / exact.norm().max(1.0));
        }
        for (n, e) in [(1, ext.e1), (2, ext.e2)] {
            let exact = energy(&model, n).unwrap();
            e_err = e_err.max((e - exact).norm() / exact);
        }
        let (o1, o2) = (x1_ode_coefficients(fam, 1).unwrap(), x1_ode_coefficients(fam, 2).unwrap());
        let gap = gauge_energy(&gm, &o1) - gauge_energy(&gm, &o2);
        for &x in &grid {
            let d = pct_e_minus_v(&gm, &o1, x).unwrap() - pct_e_minus_v(&gm, &o2, x).unwrap();
            drift = drift.max((d - gap).norm() / gap.norm());
        }
    }
    Outcome::new(
        v_err <= 1e-8 && e_err <= 1e-8 && drift <= 1e-9,
        format!("V rel err {v_err:.2e}, E rel err {e_err:.2e} (tol 1e-8); constant-difference drift {drift:.2e} (tol 1e-9)"),
    )
}

fn criterion_5() -> Outcome {
    let edge = FRAC_PI_2 / 1.25;
    let cases = [
        ("radial", radial_fig().hermitian(), 1e-8, 12.0),
        ("scarf", scarf_fig(Branch::Sin).hermitian(), -edge, edge),
    ];
    let mut pass = true;
    let (mut worst_rel, mut ratios) = (0.0_f64, Vec::new());
    for (_, m, lo, hi) in cases {
        let coarse = lowest_eigenvalues(&discretize(&m, lo, hi, 4000).unwrap(), 4).unwrap();
        let fine = lowest_eigenvalues(&discretize(&m, lo, hi, 8001).unwrap(), 4).unwrap();
        for n in 1..=4 {
            let exact = energy(&m, n).unwrap();
            let (ec, ef) = (coarse[n - 1] - exact, fine[n - 1] - exact);
            worst_rel = worst_rel.max(ec.abs() / exact);
            let ratio = ec / ef;
            pass &= (3.5..=4.5).contains(&ratio);
            ratios.push(ratio);
        }
    }
    pass &= worst_rel <= 1e-3;
    let (rmin, rmax) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(*r), b.max(*r)));
    Outcome::new(
        pass,
        format!("max rel err {worst_rel:.2e} at N=4000 (tol 1e-3); h-halving factors in [{rmin:.4}, {rmax:.4}] (need [3.5, 4.5])"),
    )
}

fn criterion_6() -> Outcome {
    let m = radial_fig();
    let t = discretize(&m, -12.0, 12.0, 4000).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut notes = Vec::new();
    for n in 1..=3 {
        let e = energy(&m, n).unwrap();
        let pair = eigen_near_shift(&t, Complex64::new(e, 0.3), 500).unwrap();
        let lam = pair.value;
        let im_rel = lam.im.abs() / lam.norm();
        let re_rel = (lam.re - e).abs() / e;
        pass &= im_rel <= 1e-6 && re_rel <= 1e-3;
        parts.push(format!("n={n}: |Im|/|l| {im_rel:.1e}, |Re-E|/E {re_rel:.1e}"));
        let mean = pair.cluster_mean();
        notes.push(format!(
            "n={n}: Ritz pair {:.9}{:+.2e}i / {:.9}{:+.2e}i, pair mean Im/|l| {:.1e}, Re rel err {:.1e}",
            lam.re,
            lam.im,
            pair.partner.unwrap().re,
            pair.partner.unwrap().im,
            mean.im.abs() / mean.norm(),
            (mean.re - e).abs() / e
        ));
    }
    // same run with non-integer a, where the levels are simple
    let control = PotentialModel::radial(2.3, 1.75, 1.2).unwrap();
    let tc = discretize(&control, -12.0, 12.0, 4000).unwrap();
    let worst = (1..=3)
        .map(|n| {
            let lam = eigen_near_shift(&tc, Complex64::new(energy(&control, n).unwrap(), 0.3), 500).unwrap().value;
            lam.im.abs() / lam.norm()
        })
        .fold(0.0, f64::max);
    notes.push(format!("control a=2.3: max |Im|/|l| {worst:.1e}"));
    let mut out = Outcome::new(pass, format!("{} (tol 1e-6, 1e-3)", parts.join("; ")));
    out.notes = notes;
    out
}

fn criterion_7() -> Outcome {
    let radial_grid = linspace(0.05, 5.0, 200);
    let edge = FRAC_PI_2 / 1.25;
    let scarf_grid = linspace(-edge + 0.01, edge - 0.01, 200);
    let cos_grid = linspace(0.01, PI / 1.25 - 0.01, 200);
    let r = radial_fig();
    let s = scarf_fig(Branch::Sin);
    let c = scarf_fig(Branch::Cos);
    let vals = [
        ("radial quasi", quasi_hermiticity_residual(&r, &radial_grid).unwrap().relative(), 1e-11, true),
        ("radial pseudo", pseudo_hermiticity_residual(&r, &radial_grid).unwrap().relative(), 1e-11, true),
        ("radial PT", pt_symmetry_residual(&r, &radial_grid).unwrap().relative(), 1e-12, true),
        ("scarf quasi", quasi_hermiticity_residual(&s, &scarf_grid).unwrap().relative(), 1e-11, true),
        ("scarf pseudo", pseudo_hermiticity_residual(&s, &scarf_grid).unwrap().relative(), 1e-11, true),
        ("scarf-cos PT", pt_symmetry_residual(&c, &cos_grid).unwrap().relative(), 1e-12, true),
        ("scarf-sin PT (a!=b, must exceed)", pt_symmetry_residual(&s, &scarf_grid).unwrap().relative(), 1e-2, false),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, v, tol, at_most) in vals {
        pass &= if at_most { v <= tol } else { v > tol };
        parts.push(format!("{name} {v:.1e}"));
    }
    Outcome::new(pass, parts.join(", "))
}

fn criterion_8() -> Outcome {
    let edge = FRAC_PI_2 / 1.25;
    let cases = [
        (radial_fig().hermitian(), linspace(0.1, 6.0, 60)),
        (radial_fig(), linspace(-6.0, 6.0, 61)),
        (scarf_fig(Branch::Sin).hermitian(), linspace(-edge + 0.05, edge - 0.05, 60)),
        (scarf_fig(Branch::Sin), linspace(-3.0 * edge, 3.0 * edge, 61)),
    ];
    let mut worst = 0.0_f64;
    for (m, grid) in cases {
        for n in 1..=3 {
            worst = worst.max(schrodinger_residual(&m, n, &grid).unwrap());
        }
    }
    Outcome::new(worst <= 1e-6, format!("max residual {worst:.2e} over 12 (model, eps, n) cases (tol 1e-6)"))
}

fn run_cli(args: &[&str], dir: &Path, threads: &str) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_xspectra"))
        .args(args)
        .current_dir(dir)
        .env("XSPECTRA_THREADS", threads)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn csv_matches_golden(got: &str, golden: &str) -> bool {
    let (g, w): (Vec<&str>, Vec<&str>) = (got.lines().collect(), golden.lines().collect());
    if g.len() != w.len() || g.first() != w.first() {
        return false;
    }
    g.iter().zip(&w).skip(1).all(|(a, b)| {
        let (a, b): (Vec<&str>, Vec<&str>) = (a.split(',').collect(), b.split(',').collect());
        a.len() == b.len()
            && a.iter().zip(&b).all(|(x, y)| {
                let (x, y): (f64, f64) = (x.parse().unwrap_or(f64::NAN), y.parse().unwrap_or(f64::NAN));
                (x - y).abs() <= 1e-12 * y.abs().max(1e-300) || x == y
            })
    })
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let table = [
        "table", "--family", "radial", "--a", "2", "--k", "1.75", "--eps", "1.2", "--xmin", "-1", "--xmax", "1",
        "--points", "5", "--psi", "1",
    ];
    let mut failures = Vec::new();

    let (c1, _) = run_cli(&[&table[..], &["--output", "t1.csv"]].concat(), d, "1");
    let (c2, _) = run_cli(&[&table[..], &["--output", "t2.csv"]].concat(), d, "4");
    let (t1, t2) = (fs::read(d.join("t1.csv")).unwrap_or_default(), fs::read(d.join("t2.csv")).unwrap_or_default());
    if c1 != 0 || c2 != 0 || t1.is_empty() || t1 != t2 {
        failures.push("table not byte-identical across runs and thread counts".to_string());
    }
    let golden = fs::read_to_string(golden_dir.join("table_radial_shifted.csv")).unwrap();
    if !csv_matches_golden(&String::from_utf8_lossy(&t1), &golden) {
        failures.push("table differs from golden file".into());
    }

    let spectrum = ["spectrum", "--family", "scarf", "--nmax", "2", "--grid", "200", "--output", "s.csv"];
    let (cs, _) = run_cli(&spectrum, d, "2");
    let golden = fs::read_to_string(golden_dir.join("spectrum_scarf.csv")).unwrap();
    let got = fs::read_to_string(d.join("s.csv")).unwrap_or_default();
    if cs != 0 || !csv_matches_golden(&got, &golden) {
        failures.push("spectrum differs from golden file".into());
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("s.json")).unwrap_or_default()).unwrap_or_default();
    if manifest["outputs"].as_array().map(|a| a.len()) != Some(2) {
        failures.push("manifest does not list both outputs".into());
    }

    let exit_cases: [(&[&str], i32); 4] = [
        (&["spectrum", "--family", "radial", "--grid", "200", "--tol-spectrum", "1e-12", "--output", "f.csv"], 1),
        (&["table", "--family", "radial", "--a", "1", "--eps", "2", "--output", "bad.csv"], 2),
        (&["verify", "--suite", "nonexistent"], 2),
        (&["verify", "--suite", "zeros", "--a", "5", "--nmax", "8", "--output", "z.json"], 0),
    ];
    for (args, want) in exit_cases {
        let (code, stderr) = run_cli(args, d, "2");
        if code != want {
            failures.push(format!("`{}` exited {code}, expected {want}", args.join(" ")));
        }
        if want != 0 && !stderr.lines().any(|l| l.starts_with("error:")) {
            failures.push(format!("`{}` gave no error: line", args.join(" ")));
        }
    }
    if d.join("bad.csv").exists() {
        failures.push("failed validation still wrote output".into());
    }
    let detail = if failures.is_empty() {
        "golden table and spectrum, byte-identical reruns (1 vs 4 threads), exit codes 0/1/2".to_string()
    } else {
        failures.join("; ")
    };
    Outcome::new(failures.is_empty(), detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("X1 members L1, L2, P1, P2", criterion_1),
        ("Laguerre orthogonality and norms", criterion_2),
        ("Laguerre zero structure", criterion_3),
        ("transformation engine vs closed forms", criterion_4),
        ("Hermitian spectra and h^2 convergence", criterion_5),
        ("reality of shifted radial spectrum", criterion_6),
        ("similarity and PT identities", criterion_7),
        ("Schrodinger residuals of closed-form states", criterion_8),
        ("CLI determinism and exit codes", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} - {name}: {} [{:.2?}]", i + 1, out.detail, start.elapsed());
        for note in &out.notes {
            println!("    note: {note}");
        }
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
