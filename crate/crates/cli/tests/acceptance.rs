//! Acceptance criteria 1-9, one PASS/FAIL line each. Every suite is also
//! held to the 5 s budget. Exits nonzero when any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use curvlab::curvature::{metric_curvature, metric_curvature_at, riemann_numerator, CurvaturePack, MetricField};
use curvlab::jets::{Jet2Diffeo, Jet2VertAut};
use curvlab::orbits::{
    acs_projection, act_on_acs_jet, act_on_acs_jet_general, act_on_connection_jet, act_on_connection_jet_general,
    act_on_super_jet, reduce_connection_jet, reduce_super_jet, witness_between, SuperAut,
};
use curvlab::polyfield::index_tuples;
use curvlab::{gen, Limits, Poly, PolyMatrix};
use curvlab_cli::report::ReportFile;
use curvlab_cli::spec::FieldSpecFile;
use curvlab_cli::verify::{run_suite, Suite, SuiteOutcome};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SUITE_BUDGET_S: f64 = 5.0;
const SEED: u64 = 20240601;

#[derive(Default)]
struct Criterion {
    failures: Vec<String>,
    details: Vec<String>,
}

impl Criterion {
    fn check(&mut self, what: impl Into<String>, ok: bool) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.details.push(what.into());
    }

    /// Runs `body` as one suite and checks the time budget.
    fn timed<T>(&mut self, name: &str, body: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = body(self);
        let s = start.elapsed().as_secs_f64();
        self.note(format!("{name}: {s:.2} s"));
        self.check(format!("{name} took {s:.2} s, budget {SUITE_BUDGET_S} s"), s < SUITE_BUDGET_S);
        out
    }

    /// A verify suite: every property passes with at least `min` instances
    /// and, when `exact`, zero deviation.
    fn suite(&mut self, suite: Suite, count: usize, min: &[(&str, usize)], exact: bool) -> SuiteOutcome {
        let out = self.timed(suite.as_str(), |_| run_suite(suite, SEED, count));
        for p in &out.properties {
            self.check(format!("{}: {} failed", suite.as_str(), p.name), p.passed);
            if exact {
                self.check(
                    format!("{}: {} deviation {:e}", suite.as_str(), p.name, p.max_deviation),
                    p.exact && p.max_deviation == 0.0,
                );
            }
        }
        for (name, n) in min {
            let got = out.property(name).map_or(0, |p| p.instances);
            self.check(format!("{}: {name} ran on {got} instances, need {n}", suite.as_str()), got >= *n);
        }
        if let Some(f) = &out.failure {
            self.failures.push(format!("{}: first failure {} (replay: {})", suite.as_str(), f.property, f.replay));
        }
        out
    }
}

fn rng(i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED.wrapping_add(i))
}

fn riemann_symmetries(pack: &CurvaturePack) -> bool {
    let m = pack.metric.rows();
    let r = pack.riemann_lowered();
    index_tuples(&[m; 4]).iter().all(|i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        let v = r.get(i);
        (v + r.get(&[b, a, c, d])).is_zero()
            && (v + r.get(&[a, b, d, c])).is_zero()
            && (v - r.get(&[c, d, a, b])).is_zero()
            && (&(v + r.get(&[a, c, d, b])) + r.get(&[a, d, b, c])).is_zero()
    })
}

fn criterion_1(c: &mut Criterion) {
    c.suite(Suite::Gauge, 100, &[("gauge-covariance", 100), ("pure-gauge-flatness", 100)], true);
    c.suite(Suite::Bianchi, 100, &[("d-squared", 100), ("covariant-d-squared", 100), ("bianchi", 100)], true);
}

fn criterion_2(c: &mut Criterion) {
    c.timed("riemann", |c| {
        for m in 2..=4 {
            let pack = metric_curvature(&MetricField::flat(m)).expect("flat metric");
            c.check(format!("flat Riemann nonzero in dimension {m}"), pack.riemann.is_zero());
        }
        let mut g = PolyMatrix::identity(2, 2);
        g[(1, 1)] = (&Poly::one(2) + &Poly::var(2, 0).expect("var")).pow(2);
        let polar = MetricField::new(g).expect("symmetric");
        let (_, num) = riemann_numerator(&polar).expect("numerator");
        c.check("polar-like metric: Riemann numerator nonzero", num.is_zero());
        let mut points = 0;
        let mut sym_ok = 0;
        for i in 0..40u64 {
            let mut r = rng(i);
            let m = if i % 2 == 0 { 3 } else { 4 };
            let g = gen::metric_general(&mut r, m, 2);
            let pt = gen::point(&mut r, m);
            if g.det().eval(&pt).expect("sized").is_zero() {
                continue;
            }
            points += 1;
            let pack = metric_curvature_at(&g, &pt).expect("nondegenerate point");
            if riemann_symmetries(&pack) {
                sym_ok += 1;
            }
            let at = metric_curvature_at(&polar, &pt[..2]);
            if let Ok(p) = at {
                c.check("polar-like metric: pointwise Riemann nonzero", p.riemann.is_zero());
            }
        }
        c.note(format!("symmetries and first Bianchi exact at {sym_ok}/{points} random points"));
        c.check(format!("only {points} nondegenerate points"), points >= 20);
        c.check("Riemann symmetry or first Bianchi violated", sym_ok == points);
    });
}

fn criterion_3(c: &mut Criterion) {
    c.suite(
        Suite::Weyl,
        20,
        &[("flat-weyl-zero", 1), ("conformally-flat-weyl-zero", 1), ("trace-free", 20), ("conformal-invariance", 20)],
        true,
    );
}

fn criterion_4(c: &mut Criterion) {
    c.suite(
        Suite::Nijenhuis,
        20,
        &[
            ("canonical-integrable", 1),
            ("hand-instance", 1),
            ("coordinate-vs-bracket", 20),
            ("dimension-2-vanishes", 20),
            ("pullback-integrable", 20),
        ],
        true,
    );
}

fn criterion_5(c: &mut Criterion) {
    c.suite(
        Suite::Splitting,
        50,
        &[
            ("idempotent", 100),
            ("s-annihilates-complement", 100),
            ("closed-form-agrees", 100),
            ("direct-sum-dimensions", 100),
        ],
        true,
    );
    c.timed("splitting (stated checks)", |c| {
        for m in [2usize, 4] {
            let (mut invertible, mut half, mut total) = (0, 0, 0);
            let mut ranks = std::collections::BTreeSet::new();
            for i in 0..50u64 {
                let jet = gen::jet1_acs(&mut rng(i * 7 + m as u64), m);
                let p = acs_projection(&jet).expect("valid jet");
                total += 1;
                ranks.insert((p.rank_s_k, p.dim_s2));
                if p.rank_s_k == p.dim_s2 {
                    invertible += 1;
                }
                if p.ker_s_part == p.half_jn {
                    half += 1;
                }
            }
            let ranks: Vec<String> = ranks.iter().map(|(r, d)| format!("{r}/{d}")).collect();
            c.note(format!("m={m}: s∘K full rank on {invertible}/{total} jets (rank {})", ranks.join(", ")));
            c.note(format!("m={m}: (1−P)(C) = −½·J·N(J)(0) on {half}/{total} jets"));
            c.check(format!("m={m}: s∘K not invertible (rank {})", ranks.join(", ")), invertible == total);
            c.check(format!("m={m}: (1−P)(C) ≠ −½·J·N(J)(0) on {} jets", total - half), half == total);
        }
    });
}

fn criterion_6(c: &mut Criterion) {
    let n = 100u64;
    c.timed("connection orbits", |c| {
        let (mut law, mut inv, mut wit) = (0, 0, 0);
        for i in 0..n {
            let mut r = rng(i);
            let j = gen::jet1_connection(&mut r, 3, 2);
            let h1 = gen::jet2_vert_aut(&mut r, 3, 2);
            let h2 = gen::jet2_vert_aut(&mut r, 3, 2);
            let seq = act_on_connection_jet_general(&h2, &act_on_connection_jet_general(&h1, &j).unwrap()).unwrap();
            let once = act_on_connection_jet_general(&h1.compose(&h2).unwrap(), &j).unwrap();
            let id = act_on_connection_jet_general(&Jet2VertAut::identity(3, 2), &j).unwrap();
            if seq == once && id == j {
                law += 1;
            }
            let hn = gen::jet2_vert_aut_normalized(&mut r, 3, 2);
            let j2 = act_on_connection_jet(&hn, &j).unwrap();
            if reduce_connection_jet(&j).unwrap().invariant == reduce_connection_jet(&j2).unwrap().invariant {
                inv += 1;
                if let Some(w) = witness_between(&j, &j2).unwrap() {
                    if act_on_connection_jet(&w, &j).unwrap() == j2 {
                        wit += 1;
                    }
                }
            }
        }
        c.note(format!("connection: group law {law}/{n}, invariance {inv}/{n}, witnesses {wit}/{inv}"));
        c.check("connection group law", law == n);
        c.check("connection orbit invariance", inv == n);
        c.check("connection witness construction", wit == inv);
    });
    c.timed("acs orbits", |c| {
        let (mut law, mut inv) = (0, 0);
        for i in 0..n {
            let mut r = rng(i);
            let j = gen::jet1_acs(&mut r, 4);
            let d1 = gen::jet2_diffeo(&mut r, 4);
            let d2 = gen::jet2_diffeo(&mut r, 4);
            let seq = act_on_acs_jet_general(&d2, &act_on_acs_jet_general(&d1, &j).unwrap()).unwrap();
            let once = act_on_acs_jet_general(&d1.compose(&d2).unwrap(), &j).unwrap();
            let id = act_on_acs_jet_general(&Jet2Diffeo::identity(4), &j).unwrap();
            if seq == once && id == j {
                law += 1;
            }
            let dn = gen::jet2_diffeo_normalized(&mut r, 4);
            let j2 = act_on_acs_jet(&dn, &j).unwrap();
            if acs_projection(&j).unwrap().ker_s_part == acs_projection(&j2).unwrap().ker_s_part {
                inv += 1;
            }
        }
        c.note(format!("acs: group law {law}/{n}, invariance {inv}/{n}"));
        c.check("acs group law", law == n);
        c.check("acs orbit invariance", inv == n);
    });
    c.timed("super orbits", |c| {
        let (mut law, mut inv) = (0, 0);
        for i in 0..n {
            let mut r = rng(i);
            let j = gen::jet1_super(&mut r, 2, 2, 1);
            let h1 = gen::super_aut_normalized(&mut r, 2, 2, 1);
            let h2 = gen::super_aut_normalized(&mut r, 2, 2, 1);
            let seq = act_on_super_jet(&h2, &act_on_super_jet(&h1, &j).unwrap()).unwrap();
            let once = act_on_super_jet(&h1.compose(&h2).unwrap(), &j).unwrap();
            let id = act_on_super_jet(&SuperAut::identity(2, 2, 1), &j).unwrap();
            if seq == once && id == j {
                law += 1;
            }
            let j2 = act_on_super_jet(&h1, &j).unwrap();
            if reduce_super_jet(&j).unwrap().invariant == reduce_super_jet(&j2).unwrap().invariant {
                inv += 1;
            }
        }
        c.note(format!("super: group law {law}/{n}, invariance {inv}/{n}"));
        c.check("super group law", law == n);
        c.check("super orbit invariance", inv == n);
    });
}

fn criterion_7(c: &mut Criterion) {
    c.suite(Suite::Superjet, 50, &[("commuting-square", 50), ("distinguishing-instance", 1)], true);
}

fn criterion_8(c: &mut Criterion) {
    let out = c.suite(Suite::OracleFd, 100, &[("poly-partials", 100), ("connection-jet", 100), ("acs-jet", 100)], false);
    for p in &out.properties {
        c.note(format!("{}: max relative error {:.2e}", p.name, p.max_deviation));
    }
}

fn cli_dir(sub: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn curvlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_curvlab"))
        .args(args)
        .env_remove("CURVLAB_MAX_DEGREE")
        .output()
        .expect("binary runs")
}

fn criterion_9(c: &mut Criterion) {
    c.timed("cli", |c| {
        let tmp = tempfile::TempDir::new().expect("temp dir");
        let fixtures = ["yangmills.json", "nijenhuis_hand.json", "super_distinguishing.json"];
        for f in fixtures {
            let text = std::fs::read_to_string(cli_dir("fixtures").join(f)).expect("fixture");
            let file = FieldSpecFile::from_json(&text).expect("fixture parses");
            let section = file.to_section(&Limits::default()).expect("fixture valid");
            let again = FieldSpecFile::from_json(&section.to_spec().to_json()).expect("canonical parses");
            c.check(format!("round-trip of {f}"), again.to_section(&Limits::default()).ok() == Some(section));
        }
        let golden = [
            ("yangmills.json", "yangmills", "0,0", "yangmills.json"),
            ("nijenhuis_hand.json", "nijenhuis", "0,0,0,0", "nijenhuis_hand.json"),
            ("super_quillen.json", "superq", "0,0", "super_distinguishing.json"),
            ("super_obstruction.json", "superobstruction", "0,0", "super_distinguishing.json"),
        ];
        for (g, kind, point, fixture) in golden {
            let input = cli_dir("fixtures").join(fixture);
            let input = input.to_str().expect("utf-8 path");
            let a = curvlab(&["curvature", "--kind", kind, "--point", point, input]);
            let b = curvlab(&["curvature", "--kind", kind, "--point", point, input]);
            c.check(format!("{kind} on {fixture} exited {:?}", a.status.code()), a.status.success());
            c.check(format!("{kind} on {fixture} not deterministic"), a.stdout == b.stdout);
            let want = std::fs::read(cli_dir("golden").join(g)).unwrap_or_default();
            c.check(format!("{kind} on {fixture} differs from golden {g}"), a.stdout == want);
            let text = String::from_utf8_lossy(&a.stdout);
            let rt = ReportFile::from_json(&text).map(|r| r.to_json());
            c.check(format!("report round-trip for {g}"), rt.ok().as_deref() == Some(&*text));
        }
        let v1 = curvlab(&["verify", "--suite", "gauge", "--seed", "3", "--count", "10"]);
        let v2 = curvlab(&["verify", "--suite", "gauge", "--seed", "3", "--count", "10"]);
        c.check("verify not deterministic", v1.stdout == v2.stdout && v1.status.success());

        let write = |name: &str, text: &str| {
            let p = tmp.path().join(name);
            std::fs::write(&p, text).expect("temp write");
            p.to_str().expect("utf-8 path").to_string()
        };
        let bad = write("bad.json", "{ \"format_version\": 1, ");
        let acs = write("acs.json", r#"{"format_version": 1, "case": "acs", "base_dim": 2, "components": {"1,2": "2"}}"#);
        let degenerate =
            write("g.json", r#"{"format_version": 1, "case": "metric", "base_dim": 2, "components": {"1,1": "x1", "2,2": "1"}}"#);
        for (args, want) in [
            (vec!["curvature", "--kind", "yangmills", bad.as_str()], 2),
            (vec!["curvature", "--kind", "nijenhuis", acs.as_str()], 3),
            (vec!["curvature", "--kind", "riemann", "--point", "0,0", degenerate.as_str()], 4),
            (vec!["curvature", "--kind", "riemann", "--point", "1,0", degenerate.as_str()], 0),
        ] {
            let got = curvlab(&args).status.code();
            c.check(format!("exit code {got:?} for {}, expected {want}", args.join(" ")), got == Some(want));
        }
    });
}

type CriterionFn = fn(&mut Criterion);

fn main() {
    let criteria: [(&str, CriterionFn); 9] = [
        ("exact identities: d∘d, d∇∘d∇, Bianchi, gauge covariance, pure gauge", criterion_1),
        ("Riemann: flat, polar-like, symmetries at random points", criterion_2),
        ("Weyl (m=4): flat, conformally flat, traces, conformal invariance", criterion_3),
        ("Nijenhuis: canonical, m=2, coordinate vs bracket, hand instance, pullbacks", criterion_4),
        ("splitting: P²=P, s∘(1−P)=0, s∘K invertible, closed form, (1−P)C = −½J·N", criterion_5),
        ("orbits: group laws, invariance, connection witnesses", criterion_6),
        ("superjet commuting square and distinguishing instance", criterion_7),
        ("finite-difference oracle, relative error ≤ 1e-6", criterion_8),
        ("CLI contract: round-trip, determinism, exit codes, golden fixtures", criterion_9),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let mut c = Criterion::default();
        let start = Instant::now();
        run(&mut c);
        let secs = start.elapsed().as_secs_f64();
        let verdict = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} ({secs:.2} s) {title}", i + 1);
        for d in &c.details {
            println!("    {d}");
        }
        for f in &c.failures {
            println!("    failed: {f}");
        }
        if !c.failures.is_empty() {
            failed += 1;
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
