//! `verify-all`: every module check at desk scale, assembled in job-name order.

use std::collections::BTreeMap;
use std::time::Instant;

use contact_forge::contact::DiskModel;
use contact_forge::report::{Check, Report};
use serde_json::{json, Value};

use crate::commands::{self, MonodromyArgs};
use crate::config::Config;

/// Members of the monodromy and counting suites.
pub const MK_SUITE: [(usize, &[u32]); 6] = [(1, &[1]), (1, &[2]), (1, &[3]), (2, &[1, 1]), (2, &[2, 1]), (2, &[1, 2])];

type Job = Box<dyn Fn(&Config) -> Report>;

fn tag(k: &[u32]) -> String {
    k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-")
}

pub fn desk_jobs() -> BTreeMap<String, Job> {
    let mut jobs: BTreeMap<String, Job> = BTreeMap::new();
    for m in 1..=3 {
        jobs.insert(
            format!("family-m{m}"),
            Box::new(move |cfg: &Config| {
                let mut cfg = cfg.clone();
                cfg.family.model.m = m;
                commands::family(&cfg)
            }),
        );
    }
    for (m, k) in MK_SUITE {
        jobs.insert(
            format!("monodromy-m{m}-k{}", tag(k)),
            Box::new(move |cfg: &Config| {
                let args = MonodromyArgs { m, k: k.to_vec(), expect: None, dump_paths: None, doubling: true };
                commands::braid_monodromy(cfg, &args)
            }),
        );
        jobs.insert(
            format!("euler-char-m{m}-k{}", tag(k)),
            Box::new(move |cfg: &Config| commands::euler_char(cfg, m, k)),
        );
    }
    for k1 in 1..=3 {
        jobs.insert(format!("discriminant-k{k1}"), Box::new(move |cfg: &Config| commands::discriminant(cfg, k1)));
    }
    for (k1, k2) in [(1, 1), (2, 1)] {
        jobs.insert(format!("m2-identity-k{k1}-{k2}"), Box::new(move |cfg: &Config| commands::m2(cfg, k1, k2)));
    }
    jobs.insert("sl2-exhaustive".into(), Box::new(commands::sl2_exhaustive));
    jobs.insert("anosov".into(), Box::new(commands::anosov));
    jobs.insert("plastikstufe".into(), Box::new(commands::plastikstufe));
    jobs.insert("contactization".into(), Box::new(commands::contactization));
    jobs.insert("charfol-disk3d".into(), Box::new(|cfg: &Config| commands::charfol(cfg, DiskModel::Disk3d)));
    jobs.insert("charfol-disk5d".into(), Box::new(|cfg: &Config| commands::charfol(cfg, DiskModel::Disk5d)));
    jobs
}

/// Runs `jobs` and merges their checks as `job / check`. Per-job results
/// keep their config digest and verdict; wall times stay out of `data` so
/// that only the top-level `wall_time_s` varies between runs.
pub fn run_suite(name: &str, jobs: &BTreeMap<String, Job>, cfg: &Config) -> Report {
    let start = Instant::now();
    let mut report = Report::new("verify-all", json!({ "suite": name }), cfg);
    let mut per_job = serde_json::Map::new();
    for (job, f) in jobs {
        let sub = f(cfg);
        for c in &sub.checks {
            report.push(Check { name: format!("{job} / {}", c.name), ..c.clone() });
        }
        let result = sub.data.get("result").cloned().unwrap_or(Value::Null);
        per_job.insert(
            job.clone(),
            json!({
                "command": sub.command,
                "inputs": sub.inputs,
                "overall": sub.overall(),
                "result": result,
            }),
        );
    }
    report.data = json!({ "config": cfg, "jobs": Value::Object(per_job) });
    report.wall_time_s = start.elapsed().as_secs_f64();
    report
}
