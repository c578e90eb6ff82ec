//! Second-level trend test of per-study JT values grouped by how far around
//! the ring the target spin sits.

use super::jt::jt_test;
use super::normal::Tail;
use super::result::TrendTestResult;
use super::sample::GroupedSample;
use crate::error::{ensure, Result};

/// `Y_1`: 120°-180°, `Y_2`: 60°-120°, `Y_3`: 0°-60° from spin 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    Far,
    Middle,
    Near,
}

impl Sector {
    /// Position in the JT group order `(Y_1, Y_2, Y_3)`.
    pub fn group(self) -> usize {
        match self {
            Sector::Far => 0,
            Sector::Middle => 1,
            Sector::Near => 2,
        }
    }

    pub fn label(self) -> &'static str {
        ["Y1", "Y2", "Y3"][self.group()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SectorRule {
    /// Explicit published assignment for 10-20 spins, angular rule elsewhere.
    #[default]
    Published,
    /// Angular rule with size repair for every ring size.
    Angular,
}

impl std::str::FromStr for SectorRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "published" | "table" => Ok(SectorRule::Published),
            "angular" | "angle" => Ok(SectorRule::Angular),
            other => Err(format!("unknown sector rule '{other}' (expected published|angular)")),
        }
    }
}

/// (spins range, target range, sector), inclusive ranges.
type Row = ((usize, usize), (usize, usize), Sector);

const PUBLISHED: &[Row] = &[
    ((10, 10), (5, 5), Sector::Far),
    ((11, 12), (5, 6), Sector::Far),
    ((13, 14), (6, 7), Sector::Far),
    ((15, 16), (7, 8), Sector::Far),
    ((17, 18), (7, 9), Sector::Far),
    ((19, 20), (8, 10), Sector::Far),
    ((10, 12), (3, 4), Sector::Middle),
    ((13, 14), (4, 5), Sector::Middle),
    ((15, 18), (4, 6), Sector::Middle),
    ((19, 20), (5, 7), Sector::Middle),
    ((10, 12), (1, 2), Sector::Near),
    ((13, 18), (1, 3), Sector::Near),
    ((19, 20), (1, 4), Sector::Near),
];

fn published(spins: usize, out: usize) -> Option<Sector> {
    PUBLISHED
        .iter()
        .find(|((m0, m1), (o0, o1), _)| (*m0..=*m1).contains(&spins) && (*o0..=*o1).contains(&out))
        .map(|&(_, _, s)| s)
}

/// Angle between spin 1 and spin `out` on an `spins`-ring, in degrees.
pub fn angle(spins: usize, out: usize) -> f64 {
    360.0 * (out as f64 - 1.0) / spins as f64
}

fn angular(spins: usize, out: usize) -> Sector {
    let a = angle(spins, out);
    if a <= 60.0 {
        Sector::Near
    } else if a <= 120.0 {
        Sector::Middle
    } else {
        Sector::Far
    }
}

/// Sector of every target `1..=⌈M/2⌉` of an `M`-ring.
///
/// Without a published row, targets are placed by angle; if the per-ring counts
/// then violate `|Y_3| ≥ |Y_2| ≥ |Y_1|` with one strict inequality, the
/// smallest-angle member of the offending farther sector moves one sector in.
pub fn sector_assignment(spins: usize, rule: SectorRule) -> Vec<Sector> {
    let targets = 1..=spins.div_ceil(2);
    if rule == SectorRule::Published && (10..=20).contains(&spins) {
        return targets
            .map(|out| published(spins, out).expect("published table covers 10-20 spins"))
            .collect();
    }
    let mut sectors: Vec<Sector> = targets.map(|out| angular(spins, out)).collect();
    let count = |s: &[Sector], which: Sector| s.iter().filter(|&&x| x == which).count();
    loop {
        let (far, mid, near) = (
            count(&sectors, Sector::Far),
            count(&sectors, Sector::Middle),
            count(&sectors, Sector::Near),
        );
        let ordered = near >= mid && mid >= far && (near > mid || mid > far);
        if ordered {
            break;
        }
        // move the innermost member of the sector that is too large
        let from = if far > mid { Sector::Far } else { Sector::Middle };
        let to = if from == Sector::Far { Sector::Middle } else { Sector::Near };
        let idx = sectors
            .iter()
            .position(|&s| s == from)
            .expect("a sector that is too large is nonempty");
        sectors[idx] = to;
    }
    sectors
}

pub fn sector_of(spins: usize, out: usize, rule: SectorRule) -> Result<Sector> {
    ensure!(spins >= 3, "ring needs at least 3 spins");
    ensure!(
        out >= 1 && out <= spins.div_ceil(2),
        "target {out} outside 1..={} for {spins} spins",
        spins.div_ceil(2)
    );
    Ok(sector_assignment(spins, rule)[out - 1])
}

/// One case study's JT value, with the transfer it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyJt {
    pub spins: usize,
    pub out: usize,
    pub jt: f64,
}

/// JT values grouped into `(Y_1, Y_2, Y_3)`.
pub fn sector_groups(studies: &[StudyJt], rule: SectorRule) -> Result<[Vec<f64>; 3]> {
    let mut groups: [Vec<f64>; 3] = Default::default();
    for s in studies {
        groups[sector_of(s.spins, s.out, rule)?.group()].push(s.jt);
    }
    Ok(groups)
}

/// Right-tailed JT test over `(Y_1, Y_2, Y_3)`: do studies with nearer targets
/// show larger trend statistics?
pub fn sector_meta_analysis(studies: &[StudyJt], rule: SectorRule, alpha: f64) -> Result<TrendTestResult> {
    let groups = sector_groups(studies, rule)?;
    let empty: Vec<&str> = groups
        .iter()
        .zip(["Y1", "Y2", "Y3"])
        .filter(|(g, _)| g.is_empty())
        .map(|(_, l)| l)
        .collect();
    ensure!(
        empty.is_empty(),
        "sector meta-analysis needs all three sectors populated; empty: {}",
        empty.join(", ")
    );
    let mut result = jt_test(&GroupedSample::new(groups.to_vec())?, Tail::Right, alpha)?;
    result.test = "sector-jonckheere-terpstra".into();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_examples() {
        assert_eq!(sector_of(12, 4, SectorRule::Published).unwrap(), Sector::Middle);
        assert_eq!(angle(12, 4), 90.0);
        assert_eq!(sector_of(10, 5, SectorRule::Published).unwrap(), Sector::Far);
        // 120° boundary placed differently for 15 and 18 spins in the table
        assert_eq!(sector_of(15, 6, SectorRule::Published).unwrap(), Sector::Middle);
        assert_eq!(sector_of(18, 7, SectorRule::Published).unwrap(), Sector::Far);
    }

    #[test]
    fn table_covers_every_target() {
        for m in 10..=20 {
            assert_eq!(sector_assignment(m, SectorRule::Published).len(), m.div_ceil(2));
        }
    }

    #[test]
    fn small_rings_satisfy_size_order() {
        for m in 3..=9 {
            let s = sector_assignment(m, SectorRule::Published);
            let c = |w| s.iter().filter(|&&x| x == w).count();
            let (far, mid, near) = (c(Sector::Far), c(Sector::Middle), c(Sector::Near));
            assert!(near >= mid && mid >= far && (near > mid || mid > far), "{m}: {s:?}");
        }
    }

    #[test]
    fn out_of_range_target() {
        assert!(sector_of(10, 6, SectorRule::Published).is_err());
    }

    #[test]
    fn increasing_sector_medians_reject() {
        let mut studies = Vec::new();
        for m in 10..=20usize {
            for out in 1..=m.div_ceil(2) {
                let base = match sector_of(m, out, SectorRule::Published).unwrap() {
                    Sector::Far => 1.0,
                    Sector::Middle => 5.0,
                    Sector::Near => 12.0,
                };
                studies.push(StudyJt {
                    spins: m,
                    out,
                    jt: base + 0.1 * (m as f64) + 0.01 * out as f64,
                });
            }
        }
        let r = sector_meta_analysis(&studies, SectorRule::Published, 0.05).unwrap();
        assert!(r.decision.is_reject());
    }

    #[test]
    fn missing_sector_is_an_error() {
        let studies = [
            StudyJt { spins: 12, out: 1, jt: 1.0 },
            StudyJt { spins: 12, out: 4, jt: 2.0 },
        ];
        assert!(sector_meta_analysis(&studies, SectorRule::Published, 0.05).is_err());
    }
}
