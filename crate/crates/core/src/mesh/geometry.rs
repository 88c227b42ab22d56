use super::Point;

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn det3(c0: Point, c1: Point, c2: Point) -> f64 {
    dot(c0, cross(c1, c2))
}

/// Area and centroid of a quad given in tensor order (polygon order 0,1,3,2).
pub(crate) fn quad_area_centroid(v: &[Point; 4]) -> (f64, Point) {
    let poly = [v[0], v[1], v[3], v[2]];
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for k in 0..4 {
        let p = poly[k];
        let q = poly[(k + 1) % 4];
        let w = p[0] * q[1] - q[0] * p[1];
        a += w;
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    let a = 0.5 * a;
    (a, [cx / (6.0 * a), cy / (6.0 * a), 0.0])
}

/// Smallest corner Jacobian of a tensor-ordered quad.
pub(crate) fn quad_min_corner_jacobian(v: &[Point; 4]) -> f64 {
    let poly = [v[0], v[1], v[3], v[2]];
    (0..4)
        .map(|k| {
            let p = poly[k];
            let next = sub(poly[(k + 1) % 4], p);
            let prev = sub(poly[(k + 3) % 4], p);
            next[0] * prev[1] - next[1] * prev[0]
        })
        .fold(f64::INFINITY, f64::min)
}

/// Jacobian columns of the trilinear map at reference point `xi` in [0,1]^3.
pub(crate) fn hex_jacobian(v: &[Point; 8], xi: [f64; 3]) -> [Point; 3] {
    let mut cols = [[0.0; 3]; 3];
    for (b, p) in v.iter().enumerate() {
        let bits = [b & 1, (b >> 1) & 1, (b >> 2) & 1];
        let f = |d: usize| if bits[d] == 1 { xi[d] } else { 1.0 - xi[d] };
        let df = |d: usize| if bits[d] == 1 { 1.0 } else { -1.0 };
        let g = [
            df(0) * f(1) * f(2),
            f(0) * df(1) * f(2),
            f(0) * f(1) * df(2),
        ];
        for (d, col) in cols.iter_mut().enumerate() {
            for c in 0..3 {
                col[c] += p[c] * g[d];
            }
        }
    }
    cols
}

pub(crate) fn hex_map(v: &[Point; 8], xi: [f64; 3]) -> Point {
    let mut x = [0.0; 3];
    for (b, p) in v.iter().enumerate() {
        let mut w = 1.0;
        for (d, &t) in xi.iter().enumerate() {
            w *= if (b >> d) & 1 == 1 { t } else { 1.0 - t };
        }
        for c in 0..3 {
            x[c] += w * p[c];
        }
    }
    x
}

pub(crate) const GAUSS2: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

/// Volume and centroid of a trilinear hexahedron (exact with 2x2x2 Gauss).
pub(crate) fn hex_volume_centroid(v: &[Point; 8]) -> (f64, Point) {
    let mut vol = 0.0;
    let mut c = [0.0; 3];
    for &a in &GAUSS2 {
        for &b in &GAUSS2 {
            for &g in &GAUSS2 {
                let xi = [a, b, g];
                let j = hex_jacobian(v, xi);
                let w = det3(j[0], j[1], j[2]) * 0.125;
                let x = hex_map(v, xi);
                vol += w;
                for d in 0..3 {
                    c[d] += w * x[d];
                }
            }
        }
    }
    (vol, scale(c, 1.0 / vol))
}

pub(crate) fn hex_min_corner_jacobian(v: &[Point; 8]) -> f64 {
    (0..8)
        .map(|b| {
            let xi = [(b & 1) as f64, ((b >> 1) & 1) as f64, ((b >> 2) & 1) as f64];
            let j = hex_jacobian(v, xi);
            det3(j[0], j[1], j[2])
        })
        .fold(f64::INFINITY, f64::min)
}

/// Vector area of a (possibly non-planar) quad given in cyclic order.
pub(crate) fn quad_area_vector(q: &[Point; 4]) -> Point {
    scale(cross(sub(q[2], q[0]), sub(q[3], q[1])), 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_hex() -> [Point; 8] {
        let mut v = [[0.0; 3]; 8];
        for (b, p) in v.iter_mut().enumerate() {
            *p = [(b & 1) as f64, ((b >> 1) & 1) as f64, ((b >> 2) & 1) as f64];
        }
        v
    }

    #[test]
    fn unit_shapes() {
        let (a, c) = quad_area_centroid(&[
            [0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [2.0, 1.0, 0.0],
        ]);
        assert!((a - 2.0).abs() < 1e-15);
        assert!((c[0] - 1.0).abs() < 1e-15 && (c[1] - 0.5).abs() < 1e-15);
        let (v, c) = hex_volume_centroid(&unit_hex());
        assert!((v - 1.0).abs() < 1e-14);
        assert!(c.iter().all(|x| (x - 0.5).abs() < 1e-14));
    }

    #[test]
    fn trapezoid_quad_matches_formula() {
        // trapezoid with parallel sides 2 and 1, height 1: area 1.5, centroid y = (2*1+1)/(3*3) = 4/9
        let (a, c) = quad_area_centroid(&[
            [0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [0.5, 1.0, 0.0],
            [1.5, 1.0, 0.0],
        ]);
        assert!((a - 1.5).abs() < 1e-14);
        assert!((c[1] - 4.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn sheared_hex_volume_is_preserved() {
        let mut v = unit_hex();
        for p in v.iter_mut() {
            p[0] += 0.3 * p[2];
        }
        let (vol, c) = hex_volume_centroid(&v);
        assert!((vol - 1.0).abs() < 1e-14);
        assert!((c[0] - 0.65).abs() < 1e-14);
    }

    #[test]
    fn inverted_corner_detected() {
        let mut v = unit_hex();
        v[7] = [0.2, 0.2, 0.2];
        assert!(hex_min_corner_jacobian(&v) < 0.0);
        assert!(hex_min_corner_jacobian(&unit_hex()) > 0.0);
        let q = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [-0.5, -0.5, 0.0],
        ];
        assert!(quad_min_corner_jacobian(&q) < 0.0);
    }

    #[test]
    fn quad_area_vector_of_unit_square() {
        let q = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
        ];
        assert_eq!(quad_area_vector(&q), [0.0, 0.0, 1.0]);
    }
}
