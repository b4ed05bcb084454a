//! Level-set extraction on phase-space fields by marching squares.

use std::collections::HashMap;

use crate::wigner::ScalarField;

/// A chain of contour points `(x, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    /// True when the last point joins back to the first.
    pub closed: bool,
}

impl Polyline {
    /// Consecutive point pairs, including the closing pair of a loop.
    pub fn segments(&self) -> Vec<((f64, f64), (f64, f64))> {
        let mut s: Vec<_> = self.points.windows(2).map(|w| (w[0], w[1])).collect();
        if self.closed && self.points.len() > 2 {
            s.push((*self.points.last().unwrap(), self.points[0]));
        }
        s
    }
}

/// Grid edge: `(axis, i, j)`, axis 0 joins `(i, j)`–`(i+1, j)` and axis 1
/// joins `(i, j)`–`(i, j+1)`.
type EdgeKey = (u8, usize, usize);

/// Polylines of `field == level`, with linear interpolation along cell
/// edges and saddle cells resolved by the cell-centre average. Nodes equal
/// to `level` count as below it.
pub fn contour_lines(field: &ScalarField, level: f64) -> Vec<Polyline> {
    let g = field.grid();
    let (nx, np) = (g.x.len(), g.p.len());
    let v = |i: usize, j: usize| field.get(i, j) - level;
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..np - 1 {
            let c = [v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)];
            let case = c.iter().enumerate().fold(0u8, |m, (k, &x)| m | (((x > 0.0) as u8) << k));
            let e = [(0, i, j), (1, i + 1, j), (0, i, j + 1), (1, i, j)];
            let pairs: &[(usize, usize)] = match case {
                0 | 15 => &[],
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(2, 3)],
                5 | 10 => {
                    let centre_up = c.iter().sum::<f64>() > 0.0;
                    if (case == 5) == centre_up {
                        &[(0, 1), (2, 3)]
                    } else {
                        &[(3, 0), (1, 2)]
                    }
                }
                _ => unreachable!(),
            };
            for &(a, b) in pairs {
                segments.push((e[a], e[b]));
            }
        }
    }
    let point = |k: EdgeKey| -> (f64, f64) {
        let (axis, i, j) = k;
        let (a, b, (i2, j2)) = if axis == 0 {
            (v(i, j), v(i + 1, j), (i + 1, j))
        } else {
            (v(i, j), v(i, j + 1), (i, j + 1))
        };
        let t = a / (a - b);
        let (x0, p0) = (g.x.node(i), g.p.node(j));
        let (x1, p1) = (g.x.node(i2), g.p.node(j2));
        (x0 + t * (x1 - x0), p0 + t * (p1 - p0))
    };
    chain(&segments).into_iter().map(|(keys, closed)| Polyline {
        points: keys.into_iter().map(point).collect(),
        closed,
    }).collect()
}

/// Zero level set.
pub fn zero_contours(field: &ScalarField) -> Vec<Polyline> {
    contour_lines(field, 0.0)
}

fn chain(segments: &[(EdgeKey, EdgeKey)]) -> Vec<(Vec<EdgeKey>, bool)> {
    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(s);
        by_edge.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start: usize, from: EdgeKey, used: &mut Vec<bool>| -> (Vec<EdgeKey>, bool) {
        let mut keys = vec![from];
        let mut seg = start;
        let mut at = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            if next == from {
                return (keys, true);
            }
            keys.push(next);
            at = next;
            match by_edge[&next].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => return (keys, false),
            }
        }
    };
    // Open chains start at edges touched by one segment; segments are
    // visited in order so the output is deterministic.
    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        let (a, b) = segments[s];
        if by_edge[&a].len() == 1 {
            out.push(walk(s, a, &mut used));
        } else if by_edge[&b].len() == 1 {
            out.push(walk(s, b, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            out.push(walk(s, segments[s].0, &mut used));
        }
    }
    out
}
