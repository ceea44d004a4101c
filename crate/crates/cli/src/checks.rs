//! Independent cross-checks of a classification: the orbit oracle and the
//! singular-point properties of component boundaries.

use iet_core::iet::merge_touching;
use iet_core::orbits::boundaries_on_connections;
use iet_core::{periodic_components_oracle, ComponentReport, Iet, Interval, OracleCaps};

/// Scan depth floor for boundary connections.
pub const CONNECTION_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    /// The oracle ran out of depth before every periodic cell closed up.
    Inconclusive,
    Disagree(String),
}

pub fn longest_cycle(report: &ComponentReport) -> usize {
    report.components.iter().filter_map(|c| c.cycle_length).max().unwrap_or(0)
}

type Key = (Vec<Interval>, usize, bool);

fn sorted(mut v: Vec<Key>) -> Vec<Key> {
    v.sort_by(|a, b| a.0[0].lo.cmp_exact(&b.0[0].lo));
    v
}

fn sorted_union(mut v: Vec<Interval>) -> Vec<Interval> {
    v.sort_by(|a, b| a.lo.cmp_exact(&b.lo));
    merge_touching(v)
}

/// Runs the oracle with a depth budget of at least `max_depth` and four
/// times the longest cycle, and compares supports, periods and flips.
pub fn oracle_agreement(t: &Iet, report: &ComponentReport, max_depth: usize) -> Agreement {
    let caps = OracleCaps { max_depth: max_depth.max(4 * longest_cycle(report)), ..OracleCaps::default() };
    let oracle = match periodic_components_oracle(t, caps) {
        Ok(o) => o,
        Err(e) => return Agreement::Disagree(e.to_string()),
    };
    let mine = sorted(
        report.periodic().map(|c| (c.support.clone(), c.period.unwrap_or(0), c.flipped.unwrap_or(false))).collect(),
    );
    let theirs = sorted(oracle.components.iter().map(|c| (c.support.clone(), c.period, c.flipped)).collect());
    let unresolved = sorted_union(oracle.unresolved.clone());
    let minimal = sorted_union(report.minimal().flat_map(|c| c.support.iter().cloned()).collect());
    if mine == theirs && unresolved == minimal {
        return Agreement::Agree;
    }
    if theirs.iter().all(|k| mine.contains(k)) && oracle.depth >= caps.max_depth && !oracle.unresolved.is_empty() {
        return Agreement::Inconclusive;
    }
    Agreement::Disagree(format!(
        "classification has {} periodic components (periods {:?}), the oracle found {} (periods {:?})",
        mine.len(),
        mine.iter().map(|k| k.1).collect::<Vec<_>>(),
        theirs.len(),
        theirs.iter().map(|k| k.1).collect::<Vec<_>>()
    ))
}

/// Every minimal component contains an interior singular point, and every
/// endpoint of a component support inside the domain lies on a saddle
/// connection.
pub fn singular_point_checks(t: &Iet, report: &ComponentReport, orbit_cap: usize) -> Result<(), String> {
    let interior = &t.breakpoints()[1..t.n()];
    for c in report.minimal() {
        if !interior.iter().any(|x| c.support.iter().any(|iv| iv.contains(x))) {
            return Err(format!("minimal component at {} has no singular point", c.witness));
        }
    }
    let c = t.total_length();
    let supports: Vec<Vec<Interval>> = report
        .components
        .iter()
        .map(|comp| comp.support.iter().filter(|iv| !(iv.lo.is_zero() && &iv.hi == c)).cloned().collect())
        .collect();
    let cap = orbit_cap.max(CONNECTION_CAP).max(4 * longest_cycle(report));
    boundaries_on_connections(t, &supports, cap).map(|_| ()).map_err(|missing| {
        format!("{} support endpoints are not on saddle connections up to length {cap}", missing.len())
    })
}
