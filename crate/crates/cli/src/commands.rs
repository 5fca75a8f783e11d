//! One function per subcommand. Each returns a finished [`Report`];
//! computational errors become FAIL checks so partial results survive.

use std::fmt::Display;
use std::path::Path;
use std::time::Instant;

use contact_forge::algebra::Expr;
use contact_forge::contact::{
    boundary_contact_form, characteristic_field, charfol_report, check_characteristic, disk_model, proportionality,
    verify_anosov, verify_contactization, verify_family, verify_plastikstufe, ContactError, DiskModel,
    CHARACTERISTIC_TOL,
};
use contact_forge::milnor::{count_critical, verify_m1_discriminant, verify_m2_identity, IdentityCheck};
use contact_forge::monodromy::{critical_value_polynomial, track, verify_monodromy};
use contact_forge::report::{Check, Report, Verdict};
use contact_forge::sl2::{a_mk, chi_filling, normal_form, verify_normal_form, IntMatrix2};
use contact_forge::words::{find_cyclic_match, BraidWord};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;

pub fn matrix(m: [i64; 4]) -> IntMatrix2 {
    IntMatrix2::new(m[0].into(), m[1].into(), m[2].into(), m[3].into())
}

/// Report under construction.
pub struct Run {
    report: Report,
    result: serde_json::Map<String, Value>,
    start: Instant,
}

impl Run {
    pub fn new(command: &str, inputs: Value, cfg: &Config) -> Run {
        Run { report: Report::new(command, inputs, cfg), result: serde_json::Map::new(), start: Instant::now() }
    }

    pub fn push(&mut self, c: Check) {
        self.report.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        for c in cs {
            self.push(c);
        }
    }

    pub fn data(&mut self, key: &str, v: &impl Serialize) {
        let v = serde_json::to_value(v).unwrap_or_else(|e| Value::String(format!("unserializable: {e}")));
        self.result.insert(key.into(), v);
    }

    pub fn error(&mut self, stage: &str, e: impl Display) {
        self.push(Check::new(format!("{stage}: computation"), Verdict::Fail).detail(e.to_string()));
    }

    /// Every FAIL must carry a witness; checks that came without one point
    /// at the structured result.
    pub fn finish(mut self, cfg: &Config) -> Report {
        if self.report.checks.is_empty() {
            self.push(Check::new("no checks ran", Verdict::Fail).detail("empty report"));
        }
        for c in &mut self.report.checks {
            if c.verdict != Verdict::Pass && c.location.is_none() && c.detail.is_none() {
                c.detail = Some(match c.margin {
                    Some(m) => format!("margin {m:e}; witness data under data.result"),
                    None => "witness data under data.result".into(),
                });
            }
        }
        self.report.data = json!({ "config": cfg, "result": Value::Object(self.result) });
        self.report.wall_time_s = self.start.elapsed().as_secs_f64();
        self.report
    }
}

pub fn family(cfg: &Config) -> Report {
    let sec = &cfg.family;
    let mut run = Run::new("verify-family", json!({ "m": sec.model.m, "t": sec.ts }), cfg);
    match verify_family(&sec.model, &sec.ts) {
        Ok(r) => {
            run.extend(r.checks());
            run.data("family", &r);
        }
        Err(ContactError::Cutoffs(v)) => {
            run.push(Check::new("cutoff conditions", Verdict::Fail).detail(format!("{} violations", v.len())));
            run.data("cutoff_violations", &v);
        }
        Err(e) => run.error("family", e),
    }
    run.finish(cfg)
}

pub fn anosov(cfg: &Config) -> Report {
    let sec = &cfg.anosov;
    let mut run = Run::new("check-anosov", json!({ "matrix": sec.matrix, "grid": sec.grid }), cfg);
    match verify_anosov(&matrix(sec.matrix), sec.grid) {
        Ok(r) => {
            run.extend(r.checks());
            run.data("anosov", &r);
        }
        Err(e) => run.error("anosov", e),
    }
    run.finish(cfg)
}

fn charfol_checks(run: &mut Run, model: DiskModel, cfg: &Config) -> Result<(), ContactError> {
    let sec = &cfg.charfol;
    let (beta, nu, n) = disk_model(model)?;
    let x = characteristic_field(&beta, &nu, n)?;
    let report = charfol_report(&x, &sec.search)?;
    let points = &report.singular_points;
    let single = points.len() == 1 && points[0].index == 1 && points[0].divergence > 0.0;
    let mut c = Check::pass_if("single positive index-1 singular point", single)
        .detail(format!("{} singular points", points.len()));
    if let Some(p) = points.first() {
        c = c.location(format!("{:?}", p.location));
    }
    run.push(c);
    run.extend(report.checks());

    let samples = beta.chart().random_samples(sec.samples, cfg.seed);
    let direct = check_characteristic(&x, &beta, &nu, n, &samples)?;
    run.extend(direct.checks());
    let first = Expr::var(beta.chart().name(0));
    let nu2 = nu.scale(&(Expr::constant(2.0) + (first.clone() * first).sin()));
    let x2 = characteristic_field(&beta, &nu2, n)?;
    let (cross, dot) = proportionality(&x, &x2, &samples)?;
    run.push(
        Check::pass_if("field direction independent of volume form", cross < CHARACTERISTIC_TOL && dot >= 0.0)
            .margin(CHARACTERISTIC_TOL - cross)
            .detail(format!("max minor {cross:e}, min dot {dot:e}")),
    );
    run.data("charfol", &report);
    run.data("characteristic", &direct);
    Ok(())
}

pub fn charfol(cfg: &Config, model: DiskModel) -> Report {
    let name = match model {
        DiskModel::Disk3d => "disk3d",
        DiskModel::Disk5d => "disk5d",
    };
    let mut run = Run::new("charfol", json!({ "model": name }), cfg);
    if let Err(e) = charfol_checks(&mut run, model, cfg) {
        run.error("charfol", e);
    }
    run.finish(cfg)
}

pub fn plastikstufe(cfg: &Config) -> Report {
    let sec = &cfg.plastikstufe;
    let mut run = Run::new("check-plastikstufe", json!({ "eps": sec.eps, "matrix": sec.matrix }), cfg);
    match verify_plastikstufe(sec.eps, &matrix(sec.matrix), &sec.g) {
        Ok(r) => {
            run.extend(r.checks());
            run.data("plastikstufe", &r);
        }
        Err(e) => run.error("plastikstufe", e),
    }
    run.finish(cfg)
}

pub fn contactization(cfg: &Config) -> Report {
    let sec = &cfg.contactization;
    let inputs = json!({ "eps": sec.eps, "matrix": sec.matrix, "grid": sec.grid });
    let mut run = Run::new("verify-contactization", inputs, cfg);
    let res = boundary_contact_form(&matrix(sec.matrix)).and_then(|mu| verify_contactization(&mu, sec.eps, sec.grid));
    match res {
        Ok(r) => {
            run.extend(r.checks());
            run.data("contactization", &r);
        }
        Err(e) => run.error("contactization", e),
    }
    run.finish(cfg)
}

pub struct MonodromyArgs<'a> {
    pub m: usize,
    pub k: Vec<u32>,
    /// Braid word to compare against, in the braid grammar.
    pub expect: Option<BraidWord>,
    pub dump_paths: Option<&'a Path>,
    pub doubling: bool,
}

pub fn braid_monodromy(cfg: &Config, args: &MonodromyArgs) -> Report {
    let inputs = json!({
        "m": args.m,
        "k": args.k,
        "eps": cfg.monodromy.eps,
        "expect": args.expect.as_ref().map(|w| w.factored()),
        "doubling": args.doubling,
    });
    let mut run = Run::new("braid-monodromy", inputs, cfg);
    let r = match verify_monodromy(args.m, &args.k, &cfg.monodromy) {
        Ok(r) => r,
        Err(e) => {
            run.error("monodromy", e);
            return run.finish(cfg);
        }
    };
    run.push(
        Check::pass_if("exponent sum", r.exponent_sum == r.expected_exponent_sum)
            .margin((r.exponent_sum - r.expected_exponent_sum) as f64)
            .location(r.word.clone())
            .detail(format!("{} vs {}", r.exponent_sum, r.expected_exponent_sum)),
    );
    run.push(
        Check::pass_if(
            "strand permutation",
            r.permutation == r.expected_permutation && r.path_permutation == r.permutation,
        )
        .location(r.word.clone()),
    );
    run.push(
        Check::new("word equals expected up to rotation", r.verdict)
            .location(r.word.clone())
            .detail(format!("expected {}; rotation {:?}", r.expected, r.rotation)),
    );
    if let Some(expect) = &args.expect {
        let got = BraidWord::new(args.m + 2, r.letters.clone());
        match got.and_then(|w| find_cyclic_match(&w, expect)) {
            Ok(rot) => run.push(
                Check::pass_if("word equals --expect up to rotation", rot.is_some())
                    .location(r.word.clone())
                    .detail(format!("expect {}; rotation {rot:?}", expect.factored())),
            ),
            Err(e) => run.error("--expect", e),
        }
    }
    if args.doubling {
        let mut fine = cfg.monodromy;
        fine.track.initial_samples *= 2;
        match verify_monodromy(args.m, &args.k, &fine) {
            Ok(f) => run.push(
                Check::pass_if("word stable under doubled resolution", f.letters == r.letters)
                    .location(f.word.clone())
                    .detail(format!("{} samples vs {}", f.samples, r.samples)),
            ),
            Err(e) => run.error("doubled resolution", e),
        }
    }
    if let Some(path) = args.dump_paths {
        let dumped = critical_value_polynomial(args.m, &args.k)
            .and_then(|p| track(&p, r.eps, &cfg.monodromy.track))
            .map_err(|e| e.to_string())
            .and_then(|paths| {
                let file = std::fs::File::create(path).map_err(|e| e.to_string())?;
                paths.write_csv(std::io::BufWriter::new(file)).map_err(|e| e.to_string())
            });
        if let Err(e) = dumped {
            run.error("dump paths", e);
        }
    }
    run.data("monodromy", &r);
    run.finish(cfg)
}

pub fn sl2_normal_form(cfg: &Config, m: [i64; 4]) -> Report {
    let mut run = Run::new("sl2 normal-form", json!({ "matrix": m }), cfg);
    let a = matrix(m);
    match normal_form(&a) {
        Ok(nf) => {
            let ok = verify_normal_form(&a, &nf);
            run.push(
                Check::pass_if("witness conjugates A_{m,k} to the input", matches!(ok, Ok(true)))
                    .location(format!("{:?}", nf.witness)),
            );
            run.data("m", &nf.m);
            run.data("k", &nf.k);
            run.data("word", &nf.word_string());
            run.data("rotations", &nf.rotations());
            run.data("witness", &nf.witness);
        }
        Err(e) => run.error("normal form", e),
    }
    run.finish(cfg)
}

pub fn sl2_chi(cfg: &Config, m: usize, k: &[u32]) -> Report {
    let mut run = Run::new("sl2 chi", json!({ "m": m, "k": k }), cfg);
    match chi_filling(m, k) {
        Ok(chi) => {
            run.push(Check::new("chi_filling", Verdict::Pass).detail(chi.to_string()));
            run.data("chi", &chi);
        }
        Err(e) => run.error("chi_filling", e),
    }
    run.finish(cfg)
}

/// `11 + k₁` for `m = 1`, `10 + Σk` for `m = 2`.
pub fn expected_fibre_chi(m: usize, k: &[u32]) -> i64 {
    let sum: i64 = k.iter().map(|&x| x as i64).sum();
    if m == 1 {
        11 + sum
    } else {
        10 + sum
    }
}

pub fn euler_char(cfg: &Config, m: usize, k: &[u32]) -> Report {
    let sec = &cfg.milnor;
    let inputs = json!({ "m": m, "k": k, "delta": sec.delta, "radius": sec.radius });
    let mut run = Run::new("euler-char", inputs, cfg);
    match count_critical(m, k, sec.delta, sec.radius) {
        Ok(r) => {
            run.push(
                Check::pass_if("critical count = 12 + Σk", r.count == r.expected_count)
                    .margin(r.count as f64 - r.expected_count as f64)
                    .location(r.eliminant_digest.clone())
                    .detail(format!("{} vs {}", r.count, r.expected_count)),
            );
            let tol = contact_forge::milnor::SIDE_CONDITION_TOL;
            let worst = r.side_conditions.iter().min_by(|a, b| a.margin.total_cmp(&b.margin));
            let mut side = Check::pass_if("side conditions nondegenerate", r.min_side_margin > tol)
                .margin(r.min_side_margin - tol);
            if let Some(w) = worst {
                side = side.location(format!("xi = {:?}", w.xi));
            }
            run.push(side);
            let chi = expected_fibre_chi(m, k);
            run.push(
                Check::pass_if("fibre Euler characteristic", r.chi == chi)
                    .location(r.eliminant_digest.clone())
                    .detail(format!("{} vs {chi}", r.chi)),
            );
            run.data("critical", &r);
        }
        Err(e) => run.error("count", e),
    }
    run.finish(cfg)
}

fn identity_check(c: &IdentityCheck) -> Check {
    let detail = match (&c.constant, &c.difference) {
        (Some(k), _) => format!("constant {k}"),
        (None, Some(d)) => format!("remainder {d}"),
        (None, None) => "not proportional".into(),
    };
    Check::pass_if(&c.name, c.holds).location(format!("lhs {} rhs {}", c.lhs_digest, c.rhs_digest)).detail(detail)
}

pub fn discriminant(cfg: &Config, k1: u32) -> Report {
    let mut run = Run::new("verify-discriminant", json!({ "m": 1, "k": [k1] }), cfg);
    match verify_m1_discriminant(k1) {
        Ok(c) => {
            run.push(identity_check(&c));
            run.data("identity", &c);
        }
        Err(e) => run.error("discriminant", e),
    }
    run.finish(cfg)
}

pub fn m2(cfg: &Config, k1: u32, k2: u32) -> Report {
    let sec = &cfg.milnor;
    let inputs = json!({ "k": [k1, k2], "delta": sec.delta, "radius": sec.radius });
    let mut run = Run::new("verify-m2", inputs, cfg);
    match verify_m2_identity(k1, k2, sec.delta, sec.radius) {
        Ok(r) => {
            run.push(identity_check(&r.limit));
            run.push(identity_check(&r.eliminant));
            run.push(
                Check::pass_if("combination and eliminant root counts agree", r.combination_roots == r.eliminant_roots)
                    .detail(format!("{} vs {}", r.combination_roots, r.eliminant_roots)),
            );
            let tol = contact_forge::milnor::BACK_SUBSTITUTION_TOL;
            run.push(
                Check::pass_if("back substitution", r.back_substitution.max_residual < tol)
                    .margin(tol - r.back_substitution.max_residual),
            );
            run.data("m2", &r);
        }
        Err(e) => run.error("m2 identity", e),
    }
    run.finish(cfg)
}

/// All `k ∈ ℕ^m` with `0 < Σk ≤ max_sum`.
pub fn exponent_tuples(m: usize, max_sum: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|k: Vec<u32>| {
                let used: u32 = k.iter().sum();
                (0..=max_sum - used).map(move |x| {
                    let mut k = k.clone();
                    k.push(x);
                    k
                })
            })
            .collect();
    }
    out.retain(|k| k.iter().sum::<u32>() > 0);
    out
}

/// Normal-form round trip over every `A_{m,k}` with `m ≤ 3`, `Σk ≤ 4`,
/// and the two displayed filling formulas.
pub fn sl2_exhaustive(cfg: &Config) -> Report {
    let mut run = Run::new("sl2 exhaustive", json!({ "max_m": 3, "max_sum": 4 }), cfg);
    let mut cases = 0;
    let mut misses = Vec::new();
    for m in 1..=3 {
        for k in exponent_tuples(m, 4) {
            cases += 1;
            let ok = a_mk(m, &k).and_then(|a| {
                let nf = normal_form(&a)?;
                Ok(nf.rotations().contains(&k) && verify_normal_form(&a, &nf)?)
            });
            if !matches!(ok, Ok(true)) {
                misses.push(format!("m={m} k={k:?}: {ok:?}"));
            }
        }
    }
    let mut c = Check::pass_if("normal_form(a_mk) round trip", misses.is_empty()).detail(format!("{cases} cases"));
    if let Some(w) = misses.first() {
        c = c.location(w.clone());
    }
    run.push(c);
    let one = chi_filling(1, &[1]);
    run.push(Check::pass_if("chi_filling(1,(1)) = 12", one == Ok(12)).detail(format!("{one:?}")));
    let bad = exponent_tuples(2, 4)
        .into_iter()
        .chain(exponent_tuples(3, 4))
        .find(|k| chi_filling(k.len(), k) != Ok(k.iter().map(|&x| x as i64).sum()));
    let mut c = Check::pass_if("chi_filling = Σk for m ≥ 2", bad.is_none());
    if let Some(k) = &bad {
        c = c.location(format!("k = {k:?}"));
    }
    run.push(c);
    run.data("cases", &cases);
    run.finish(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_tuples_enumerates_compositions() {
        assert_eq!(exponent_tuples(1, 4), [[1], [2], [3], [4]]);
        // weak compositions of 1..=4 into 2 parts: 2 + 3 + 4 + 5
        assert_eq!(exponent_tuples(2, 4).len(), 14);
        assert_eq!(exponent_tuples(3, 4).len(), 34);
    }

    #[test]
    fn errors_become_failing_checks_with_witness() {
        let cfg = Config::default();
        let r = sl2_normal_form(&cfg, [1, 1, 0, 1]);
        assert_eq!(r.overall(), Verdict::Fail);
        assert!(r.checks.iter().all(|c| c.detail.is_some() || c.location.is_some()));
        assert!(!euler_char(&cfg, 3, &[1]).all_pass());
    }

    #[test]
    fn fibre_chi_formula() {
        assert_eq!(expected_fibre_chi(1, &[2]), 13);
        assert_eq!(expected_fibre_chi(2, &[2, 1]), 13);
    }
}
