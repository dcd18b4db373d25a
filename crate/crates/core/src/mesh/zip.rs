//! Triangulation of the strip between two node polylines sampled at
//! different parameters.

/// Triangles filling the strip between `a` and `b`, each a list of
/// `(parameter, node)` sorted by parameter with matching end parameters.
/// Orientation is left to the caller.
pub(crate) fn zip_strip(a: &[(f64, usize)], b: &[(f64, usize)]) -> Vec<[usize; 3]> {
    let mut tris = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i + 1 < a.len() || j + 1 < b.len() {
        let advance_a = if i + 1 >= a.len() {
            false
        } else if j + 1 >= b.len() {
            true
        } else {
            // Advance along the side whose next segment midpoint comes first.
            a[i].0 + a[i + 1].0 <= b[j].0 + b[j + 1].0
        };
        if advance_a {
            tris.push([a[i].1, a[i + 1].1, b[j].1]);
            i += 1;
        } else {
            tris.push([a[i].1, b[j + 1].1, b[j].1]);
            j += 1;
        }
    }
    tris
}

/// Triangles between two closed loops given as `(angle, node)` in
/// increasing angle within one turn.
pub(crate) fn zip_loops(outer: &[(f64, usize)], inner: &[(f64, usize)]) -> Vec<[usize; 3]> {
    use std::f64::consts::TAU;
    let a0 = outer[0].0;
    // Rotate the inner loop to start at the node nearest to a0.
    let start = (0..inner.len())
        .min_by(|&p, &q| {
            let d = |k: usize| {
                let t = (inner[k].0 - a0).rem_euclid(TAU);
                t.min(TAU - t)
            };
            d(p).total_cmp(&d(q))
        })
        .unwrap();
    let mut a: Vec<(f64, usize)> = outer.to_vec();
    a.push((a0 + TAU, outer[0].1));
    let mut b = Vec::with_capacity(inner.len() + 1);
    let base = inner[start].0;
    let shift = {
        // Unwrap the rotated start angle to the branch closest to a0.
        let t = (base - a0).rem_euclid(TAU);
        if t > 0.5 * TAU {
            t - TAU
        } else {
            t
        }
    };
    for k in 0..inner.len() {
        let idx = (start + k) % inner.len();
        let t = (inner[idx].0 - base).rem_euclid(TAU);
        b.push((a0 + shift + t, inner[idx].1));
    }
    b.push((a0 + shift + TAU, inner[start].1));
    zip_strip(&a, &b)
}
