//! Zero-dimensional sublevel persistence of `Ŝ` on the sampled circle or
//! arc, with the essential classes tracked separately.

use serde::Serialize;

use super::{ActionProfile, SpectralError};
use crate::geometry::ConormalTarget;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceDiagram {
    /// Finite bars `(birth, death)` with `death > birth`, sorted by birth.
    pub bars: Vec<(f64, f64)>,
    pub essential_0_birth: f64,
    /// Level at which the top class appears: the cycle closing on the circle,
    /// the sublevel set covering the whole arc otherwise.
    pub essential_1_birth: f64,
}

/// Persistence of `Ŝ` restricted to `target` (Whole or Arc).
pub fn persistence(profile: &ActionProfile, target: &ConormalTarget) -> Result<PersistenceDiagram, SpectralError> {
    target.validate()?;
    let prim = profile.require_primitive()?;
    match target {
        ConormalTarget::Point { .. } => Err(SpectralError::UnsupportedTarget(target.to_string())),
        ConormalTarget::Whole => {
            let values: Vec<f64> = prim.samples().map(|(_, v)| v).collect();
            Ok(sublevel(&values, true))
        }
        ConormalTarget::Arc { a, b, .. } => {
            let len = a.ccw_offset_to(*b);
            let mut pts: Vec<(f64, f64)> = prim
                .samples()
                .map(|(x, v)| (a.ccw_offset_to(crate::geometry::BasePoint::new(x).expect("wrapped")), v))
                .filter(|(off, _)| *off > 0.0 && *off < len)
                .collect();
            pts.push((0.0, prim.eval(a.value())));
            pts.push((len, prim.eval(b.value())));
            pts.sort_by(|l, r| l.0.total_cmp(&r.0));
            let values: Vec<f64> = pts.into_iter().map(|(_, v)| v).collect();
            Ok(sublevel(&values, false))
        }
    }
}

/// Union-find sweep over a path (or cycle) graph filtered by vertex values.
pub fn sublevel(values: &[f64], cyclic: bool) -> PersistenceDiagram {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let mut parent: Vec<usize> = (0..n).collect();
    let mut birth = vec![f64::NAN; n];
    let mut active = vec![false; n];
    let mut bars = Vec::new();
    let mut essential_1 = f64::NAN;
    let mut components = 0usize;

    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }

    for &v in &order {
        let level = values[v];
        active[v] = true;
        birth[v] = level;
        components += 1;
        let mut neighbours = Vec::with_capacity(2);
        if v > 0 {
            neighbours.push(v - 1);
        } else if cyclic && n > 1 {
            neighbours.push(n - 1);
        }
        if v + 1 < n {
            neighbours.push(v + 1);
        } else if cyclic && n > 1 {
            neighbours.push(0);
        }
        if cyclic && n == 2 {
            neighbours.dedup();
        }
        for u in neighbours {
            if !active[u] {
                continue;
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                essential_1 = level;
                continue;
            }
            // Elder rule: the younger component dies.
            let (old, young) = if birth[ru] < birth[rv] || (birth[ru] == birth[rv] && ru < rv) {
                (ru, rv)
            } else {
                (rv, ru)
            };
            if level > birth[young] {
                bars.push((birth[young], level));
            }
            parent[young] = old;
            components -= 1;
        }
        if !cyclic && components == 1 && essential_1.is_nan() && active.iter().all(|a| *a) {
            essential_1 = level;
        }
    }
    bars.sort_by(|l, r| l.0.total_cmp(&r.0).then(l.1.total_cmp(&r.1)));
    PersistenceDiagram {
        bars,
        essential_0_birth: values[order[0]],
        essential_1_birth: essential_1,
    }
}
