//! Static SVG Gantt charts.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::model::{Instance, JobId, Schedule, Time};

const CELL: i64 = 12;
const ROW: i64 = 20;
const LEFT: i64 = 40;
const TOP: i64 = 20;

const PALETTE: [&str; 10] =
    ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"];

fn colour(id: JobId) -> &'static str {
    PALETTE[id as usize % PALETTE.len()]
}

/// Maximal runs `(machine, job, start, end)` of a labelled schedule.
pub fn runs(labels: &[Vec<(JobId, usize)>]) -> Vec<(usize, JobId, Time, Time)> {
    let mut open: BTreeMap<(usize, JobId), (Time, Time)> = BTreeMap::new();
    let mut done = Vec::new();
    for (t, slot) in labels.iter().enumerate() {
        let t = t as Time;
        for &(id, m) in slot {
            match open.get_mut(&(m, id)) {
                Some(span) if span.1 == t => span.1 = t + 1,
                _ => {
                    if let Some((s, e)) = open.insert((m, id), (t, t + 1)) {
                        done.push((m, id, s, e));
                    }
                }
            }
        }
    }
    done.extend(open.into_iter().map(|((m, id), (s, e))| (m, id, s, e)));
    done.sort_unstable();
    done
}

/// One row per machine label, one rectangle per maximal run, and a deadline
/// tick per job when the instance is given. Labels default to the sorted
/// per-slot order of `sched`.
pub fn render_gantt(
    sched: &Schedule,
    machines: usize,
    labels: Option<&[Vec<(JobId, usize)>]>,
    inst: Option<&Instance>,
) -> String {
    let owned;
    let labels = match labels {
        Some(l) => l,
        None => {
            owned = sched.labeled();
            &owned
        }
    };
    let horizon = sched.horizon().max(inst.map_or(0, Instance::max_deadline));
    let rows = machines.max(labels.iter().flatten().map(|&(_, m)| m + 1).max().unwrap_or(0)) as i64;
    let width = LEFT + horizon * CELL + 20;
    let height = TOP + rows * ROW + 30;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="monospace" font-size="9">"#);
    let axis_y = TOP + rows * ROW;
    let _ = writeln!(svg, r#"<line x1="{LEFT}" y1="{axis_y}" x2="{}" y2="{axis_y}" stroke="black"/>"#, LEFT + horizon * CELL);
    let _ = writeln!(svg, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{axis_y}" stroke="black"/>"#);
    let step = ((horizon + 19) / 20).max(1);
    for t in (0..=horizon).step_by(step as usize) {
        let x = LEFT + t * CELL;
        let _ = writeln!(svg, r#"<text x="{x}" y="{}" text-anchor="middle">{t}</text>"#, axis_y + 12);
    }
    for m in 0..rows {
        let _ = writeln!(svg, r#"<text x="4" y="{}">M{m}</text>"#, TOP + m * ROW + 13);
    }
    for (m, id, s, e) in runs(labels) {
        let (x, y, w) = (LEFT + s * CELL, TOP + m as i64 * ROW + 2, (e - s) * CELL);
        let _ = writeln!(
            svg,
            r#"<rect x="{x}" y="{y}" width="{w}" height="{}" fill="{}" stroke="black" stroke-width="0.5"><title>job {id} [{s},{e})</title></rect>"#,
            ROW - 4,
            colour(id)
        );
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{id}</text>"#, x + 2, y + 11);
    }
    if let Some(inst) = inst {
        for j in inst.jobs() {
            let x = LEFT + j.d * CELL;
            let _ = writeln!(
                svg,
                r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="{}" stroke-width="2"><title>deadline of job {}</title></line>"#,
                axis_y,
                axis_y + 6,
                colour(j.id),
                j.id
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
