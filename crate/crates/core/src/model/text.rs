//! Plain-text formats: instance files (`id r p d` per line, `#` comments)
//! and schedule dumps (`t: id,id,...` per slot).

use std::fmt::Write as _;

use super::{Instance, Job, JobId, ModelError, Schedule, Time};

pub fn parse_instance(src: &str) -> Result<Instance, ModelError> {
    let mut jobs = Vec::new();
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(ModelError::Parse { line: lineno + 1, msg: format!("expected `id r p d`, got {line:?}") });
        }
        let num = |s: &str| -> Result<i64, ModelError> {
            s.parse().map_err(|_| ModelError::Parse { line: lineno + 1, msg: format!("not an integer: {s:?}") })
        };
        let id = JobId::try_from(num(fields[0])?)
            .map_err(|_| ModelError::Parse { line: lineno + 1, msg: "id out of range".into() })?;
        jobs.push(Job { id, r: num(fields[1])?, p: num(fields[2])?, d: num(fields[3])? });
    }
    Instance::new(jobs)
}

pub fn format_instance(inst: &Instance) -> String {
    let mut out = String::from("# id r p d\n");
    for j in inst.jobs() {
        let _ = writeln!(out, "{} {} {} {}", j.id, j.r, j.p, j.d);
    }
    out
}

pub fn format_schedule(sched: &Schedule) -> String {
    let mut out = String::new();
    for (t, slot) in sched.slots().iter().enumerate() {
        let ids: Vec<String> = slot.iter().map(|id| id.to_string()).collect();
        let _ = writeln!(out, "{t}: {}", ids.join(","));
    }
    out
}

pub fn parse_schedule(src: &str) -> Result<Schedule, ModelError> {
    let mut sched = Schedule::new(0);
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ModelError::Parse { line: lineno + 1, msg };
        let (t, ids) = line.split_once(':').ok_or_else(|| err(format!("expected `t: ids`, got {line:?}")))?;
        let t: Time = t.trim().parse().map_err(|_| err(format!("bad slot {t:?}")))?;
        if t < 0 {
            return Err(err(format!("negative slot {t}")));
        }
        // materialize empty slots too
        sched.slot_mut(t);
        for id in ids.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let id: JobId = id.parse().map_err(|_| err(format!("bad job id {id:?}")))?;
            sched.push(t, id);
        }
    }
    Ok(sched)
}
