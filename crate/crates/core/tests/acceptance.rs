mod common;

use pomega_core::registry::{run_identity, Overrides, Status, VerificationReport};
use rand::SeedableRng;
use std::process::ExitCode;
use std::time::{Duration, Instant};

/// Checks whose printed statement does not hold; they are run and reported
/// but a failure of these alone does not fail the harness.
const KNOWN_FALSE: [&str; 2] = ["phat-holpart", "phat-lowering"];

struct Line {
    label: &'static str,
    pass: bool,
    /// every failing check is in KNOWN_FALSE
    tolerated: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

fn run(id: &str) -> VerificationReport {
    run_identity(id, &Overrides::default()).expect("registered identity")
}

fn summary(r: &VerificationReport) -> String {
    let mut s = format!("{} {}", r.id, format!("{:?}", r.status).to_lowercase());
    if let Some(x) = r.residual {
        s.push_str(&format!(" residual={x:.3e}"));
    }
    if let Some(w) = &r.witness {
        s.push_str(&format!(" at {}", w.location));
    }
    if let Some(m) = &r.message {
        s.push_str(&format!(" ({m})"));
    }
    s
}

fn criterion(label: &'static str, ids: &[&str], limit: Option<u64>) -> Line {
    let t = Instant::now();
    let reports: Vec<_> = ids.iter().map(|id| run(id)).collect();
    Line {
        label,
        pass: reports.iter().all(|r| r.status == Status::Pass),
        tolerated: reports.iter().all(|r| r.status == Status::Pass || KNOWN_FALSE.contains(&r.id.as_str())),
        detail: reports.iter().map(summary).collect::<Vec<_>>().join("; "),
        elapsed: t.elapsed(),
        limit: limit.map(Duration::from_secs),
    }
}

/// Ring axioms and inversion on seeded random series.
fn ring_properties() -> Result<usize, String> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20_240_611);
    let mut checks = 0;
    for _ in 0..200 {
        let a = common::random_series(&mut rng, -3, 40);
        let b = common::random_series(&mut rng, 0, 40);
        let c = common::random_series(&mut rng, 2, 40);
        let e = |x: pomega_core::Result<_>| x.map_err(|e: pomega_core::Error| e.to_string());
        common::eq(&e(a.mul(&b))?, &e(b.mul(&a))?)?;
        common::eq(&e(e(a.mul(&b))?.mul(&c))?, &e(a.mul(&e(b.mul(&c))?))?)?;
        common::eq(&e(a.mul(&e(b.add(&c))?))?, &e(e(a.mul(&b))?.add(&e(a.mul(&c))?))?)?;
        if !a.is_zero() {
            let p = e(a.mul(&e(a.invert())?))?;
            common::eq(&p, &pomega_core::QSeries::one(common::D, p.order()))?;
        }
        checks += 4;
    }
    Ok(checks)
}

fn main() -> ExitCode {
    let total = Instant::now();
    let mut lines = vec![
        criterion("1", &["cor-pwrep"], Some(30)),
        criterion("2", &["thm-pwz"], Some(60)),
        criterion("3", &["spt-andrews", "spt-omega", "sptbar-omega", "sptG2-equiv", "pomega-qomega"], Some(30)),
        criterion("4", &["finite-jtp", "heine"], None),
        criterion("5", &["brz-F"], Some(60)),
        criterion("6", &["theta-shifts"], None),
        criterion("7", &["hhat1-zero"], None),
        criterion("8", &["phat-weight1"], Some(300)),
        criterion("9", &["phat-holpart"], None),
        criterion("10", &["phat-lowering", "f2-shadow"], None),
    ];

    let t = Instant::now();
    let mut c11 = criterion("11", &["mu-laws"], None);
    match ring_properties() {
        Ok(n) => c11.detail.push_str(&format!("; ring and inversion checks: {n} ok")),
        Err(m) => {
            c11.pass = false;
            c11.tolerated = false;
            c11.detail.push_str(&format!("; ring property failed: {m}"));
        }
    }
    c11.elapsed = t.elapsed();
    lines.push(c11);

    let mut failed = false;
    for l in &lines {
        let in_time = l.limit.map_or(true, |lim| l.elapsed <= lim);
        let ok = l.pass && in_time;
        let tag = if ok { "PASS" } else { "FAIL" };
        let mut note = String::new();
        if !in_time {
            note.push_str(&format!(" [over the {}s limit]", l.limit.unwrap().as_secs()));
        }
        if !ok && in_time && l.tolerated {
            note.push_str(" [expected: statement as printed does not hold]");
        } else if !ok {
            failed = true;
        }
        println!("criterion {:>2}: {tag} {:>8.2}s  {}{note}", l.label, l.elapsed.as_secs_f64(), l.detail);
    }

    for id in ["phat-holpart-corrected", "phat-lowering-corrected", "f2-weight-half"] {
        println!("supplementary: {}", summary(&run(id)));
    }

    let wall = total.elapsed();
    let in_budget = wall <= Duration::from_secs(15 * 60);
    println!("full suite wall-clock: {:.1}s ({})", wall.as_secs_f64(), if in_budget { "within 15 min" } else { "over 15 min" });
    if failed || !in_budget {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
