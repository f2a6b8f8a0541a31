//! Small geometric kernels over attribute slices.

use crate::scalar::Scalar;

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for (k, o) in out.iter_mut().enumerate().take(a.len().min(3)) {
        *o = a[k] - b[k];
    }
    out
}

pub fn dot<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm<T: Scalar>(a: &[T; 3]) -> T {
    dot(a, a).sqrt()
}

pub fn dist2<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

/// Signed area (triangles in the plane), signed volume (tets in space) or the
/// unsigned length/area for simplices of lower dimension than the ambient
/// space. `pts` holds `k + 1` corner positions of width `width`.
pub fn signed_measure<T: Scalar>(pts: &[Vec<T>], width: usize) -> T {
    match pts.len() {
        2 => dist2(&pts[0], &pts[1]).sqrt(),
        3 => {
            let u = sub(&pts[1], &pts[0]);
            let v = sub(&pts[2], &pts[0]);
            let c = cross(&u, &v);
            if width == 2 {
                c[2] * T::half()
            } else {
                norm(&c) * T::half()
            }
        }
        4 => {
            let u = sub(&pts[1], &pts[0]);
            let v = sub(&pts[2], &pts[0]);
            let w = sub(&pts[3], &pts[0]);
            dot(&cross(&u, &v), &w) / T::of(6.0)
        }
        _ => T::zero(),
    }
}

/// Shape quality normalised to 1 for the regular simplex; negative for
/// inverted simplices when orientation is defined.
pub fn simplex_quality<T: Scalar>(pts: &[Vec<T>], width: usize) -> T {
    let n = pts.len();
    if n < 3 {
        return T::one();
    }
    let mut sum = T::zero();
    let mut count = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            sum = sum + dist2(&pts[i], &pts[j]);
            count += 1;
        }
    }
    if sum <= T::zero() {
        return T::zero();
    }
    let m = signed_measure(pts, width);
    if n == 3 {
        T::of(4.0 * 3f64.sqrt()) * m / sum
    } else {
        let rms = (sum / T::of(count as f64)).sqrt();
        T::of(6.0 * 2f64.sqrt()) * m / (rms * rms * rms)
    }
}

/// Closest point on triangle `abc` to `p` (all in 3D).
pub fn closest_point_triangle(p: [f64; 3], a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [f64; 3] {
    let ab = sub(&b, &a);
    let ac = sub(&c, &a);
    let ap = sub(&p, &a);
    let d1 = dot(&ab, &ap);
    let d2 = dot(&ac, &ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = sub(&p, &b);
    let d3 = dot(&ab, &bp);
    let d4 = dot(&ac, &bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return axpy(a, v, ab);
    }
    let cp = sub(&p, &c);
    let d5 = dot(&ab, &cp);
    let d6 = dot(&ac, &cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return axpy(a, w, ac);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return axpy(b, w, sub(&c, &b));
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    let q = axpy(a, v, ab);
    axpy(q, w, ac)
}

fn axpy(a: [f64; 3], t: f64, d: [f64; 3]) -> [f64; 3] {
    [a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_simplices_have_unit_quality() {
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]];
        assert!((simplex_quality(&tri, 2) - 1.0).abs() < 1e-12);
        let tet = vec![
            vec![1.0, 1.0, 1.0],
            vec![1.0, -1.0, -1.0],
            vec![-1.0, 1.0, -1.0],
            vec![-1.0, -1.0, 1.0],
        ];
        let q: f64 = simplex_quality(&tet, 3);
        assert!((q.abs() - 1.0).abs() < 1e-12, "{q}");
    }

    #[test]
    fn orientation_sign() {
        let tri = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(signed_measure(&tri, 2) < 0.0);
        let tet = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert!((signed_measure::<f64>(&tet, 3) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn closest_point_regions() {
        let (a, b, c) = ([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let q = closest_point_triangle([0.2, 0.2, 1.0], a, b, c);
        assert!(dist2(&q, &[0.2, 0.2, 0.0]) < 1e-30);
        assert_eq!(closest_point_triangle([-1.0, -1.0, 0.0], a, b, c), a);
        assert_eq!(closest_point_triangle([0.5, -1.0, 0.0], a, b, c), [0.5, 0.0, 0.0]);
        let q = closest_point_triangle([1.0, 1.0, 0.0], a, b, c);
        assert!((q[0] - 0.5).abs() < 1e-15 && (q[1] - 0.5).abs() < 1e-15);
    }
}
