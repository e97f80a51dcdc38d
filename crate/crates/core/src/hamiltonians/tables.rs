//! Inclination-polynomial coefficient sets of the third-order secular term,
//! the second-order long-period generator and the Brouwer comparison generator.
//!
//! Entries are kept in the factored form in which they are usually printed,
//! `scale · c^{2·c2} · (2−3s²)^f · s^{2·s2} · Π factors`, each factor being a
//! polynomial in s² with ascending integer coefficients. Expansion to plain
//! s²-polynomials happens once, with exact integer arithmetic.

use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::scalar::Scalar;

/// Powers 0..=3 of c² = 1 − s², (2 − 3s²) and s².
#[derive(Clone, Copy, Debug)]
pub struct InclinationPowers<S> {
    pub c2: [S; 4],
    pub f: [S; 4],
    pub s2: [S; 4],
}

impl<S: Scalar> InclinationPowers<S> {
    pub fn new(s2: S) -> Self {
        let cube = |x: S| {
            let x2 = x * x;
            [S::cst(1.0), x, x2, x2 * x]
        };
        InclinationPowers {
            c2: cube(-s2 + 1.0),
            f: cube(-(s2 * 3.0) + 2.0),
            s2: cube(s2),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub scale: i64,
    /// Power of c² = 1 − s².
    pub c2: u32,
    /// Power of (2 − 3s²).
    pub f: u32,
    /// Power of s².
    pub s2: u32,
    pub factors: &'static [&'static [i64]],
}

const fn e(scale: i64, c2: u32, f: u32, s2: u32, factors: &'static [&'static [i64]]) -> Entry {
    Entry {
        scale,
        c2,
        f,
        s2,
        factors,
    }
}

const O: Entry = e(0, 0, 0, 0, &[]);

/// One table row: indices (i, j) and its three columns.
#[derive(Clone, Copy, Debug)]
pub struct Row {
    pub i: usize,
    pub j: usize,
    pub cols: [Entry; 3],
}

const fn row(i: usize, j: usize, cols: [Entry; 3]) -> Row {
    Row { i, j, cols }
}

/// q_{k,i,j}; columns k = 0, 1, 2.
pub static SECULAR_THIRD_ORDER: [Row; 15] = [
    row(
        0,
        0,
        [
            e(-72, 0, 3, 2, &[]),
            e(-4, 0, 3, 0, &[&[8, -24, 41]]),
            e(18, 0, 3, 2, &[]),
        ],
    ),
    row(
        0,
        1,
        [
            e(-4, 0, 3, 0, &[&[8, -24, 67]]),
            e(-2, 0, 3, 0, &[&[144, -432, 413]]),
            e(54, 0, 3, 2, &[]),
        ],
    ),
    row(
        0,
        2,
        [
            e(-32, 0, 3, 0, &[&[8, -24, 15]]),
            e(-4, 0, 3, 0, &[&[272, -816, 513]]),
            e(9, 0, 3, 2, &[]),
        ],
    ),
    row(
        0,
        3,
        [
            e(-16, 0, 3, 0, &[&[40, -120, 63]]),
            e(-16, 0, 3, 0, &[&[120, -360, 217]]),
            O,
        ],
    ),
    row(
        0,
        4,
        [
            e(-64, 0, 3, 0, &[&[8, -24, 17]]),
            e(-160, 0, 3, 0, &[&[8, -24, 17]]),
            O,
        ],
    ),
    row(
        1,
        0,
        [
            e(-144, 1, 2, 1, &[&[-2, 15]]),
            e(-64, 1, 2, 0, &[&[6, -16, 69]]),
            e(36, 1, 2, 1, &[&[-1, 15]]),
        ],
    ),
    row(
        1,
        1,
        [
            e(-48, 1, 2, 0, &[&[8, -24, 117]]),
            e(-12, 1, 2, 0, &[&[224, -448, 1135]]),
            e(72, 1, 2, 1, &[&[-1, 18]]),
        ],
    ),
    row(
        1,
        2,
        [
            e(-288, 1, 2, 0, &[&[8, -12, 13]]),
            e(-96, 1, 2, 0, &[&[80, -144, 149]]),
            e(216, 1, 2, 2, &[]),
        ],
    ),
    row(
        1,
        3,
        [
            e(-768, 1, 2, 0, &[&[4, -6, 3]]),
            e(-64, 1, 2, 0, &[&[120, -224, 141]]),
            O,
        ],
    ),
    row(
        2,
        0,
        [
            e(432, 1, 1, 1, &[&[16, -76, 63]]),
            e(144, 1, 1, 0, &[&[-8, 80, -449, 399]]),
            e(-27, 1, 1, 1, &[&[40, -274, 243]]),
        ],
    ),
    row(
        2,
        1,
        [
            e(144, 1, 1, 0, &[&[-8, 80, -411, 375]]),
            e(144, 1, 1, 0, &[&[-40, 192, -947, 883]]),
            e(-216, 1, 1, 1, &[&[8, -56, 51]]),
        ],
    ),
    row(
        2,
        2,
        [
            e(576, 1, 1, 0, &[&[-8, 8, -27, 36]]),
            e(288, 1, 1, 0, &[&[-40, 96, -235, 223]]),
            e(1296, 2, 1, 2, &[]),
        ],
    ),
    row(
        3,
        0,
        [
            e(5184, 2, 0, 1, &[&[-2, 5], &[-5, 6]]),
            e(1728, 2, 0, 1, &[&[56, -239, 205]]),
            e(-1296, 2, 0, 1, &[&[8, -35, 30]]),
        ],
    ),
    row(
        3,
        1,
        [
            e(3456, 2, 0, 1, &[&[-3, 4], &[-4, 13]]),
            e(1728, 2, 0, 1, &[&[72, -289, 261]]),
            e(2592, 2, 1, 1, &[&[-2, 5]]),
        ],
    ),
    row(
        4,
        0,
        [
            e(-15552, 3, 0, 1, &[&[-4, 7]]),
            e(-38016, 3, 0, 1, &[&[-4, 7]]),
            e(3888, 3, 0, 1, &[&[-4, 7]]),
        ],
    ),
];

/// Column (l, k) pairs of the long-period table.
pub const LONG_PERIOD_COLUMNS: [(u32, u32); 3] = [(1, 0), (1, 1), (2, 0)];

/// b_{l,k,i,j}; columns (l,k) = (1,0), (1,1), (2,0).
pub static LONG_PERIOD_SECOND_ORDER: [Row; 15] = [
    row(
        0,
        0,
        [
            e(8, 0, 2, 0, &[&[-8, 24, 3]]),
            e(6, 0, 2, 0, &[&[8, -24, 3]]),
            e(-3, 0, 3, 0, &[]),
        ],
    ),
    row(
        0,
        1,
        [
            e(-24, 0, 2, 0, &[&[20, -60, 13]]),
            e(24, 0, 2, 0, &[&[8, -24, 7]]),
            e(-6, 0, 3, 0, &[]),
        ],
    ),
    row(
        0,
        2,
        [
            e(-32, 0, 2, 0, &[&[41, -123, 60]]),
            e(12, 0, 2, 0, &[&[24, -72, 37]]),
            e(-9, 0, 3, 0, &[]),
        ],
    ),
    row(
        0,
        3,
        [
            e(-8, 0, 2, 0, &[&[200, -600, 399]]),
            e(24, 0, 2, 0, &[&[8, -24, 15]]),
            O,
        ],
    ),
    row(0, 4, [e(-48, 0, 2, 0, &[&[16, -48, 33]]), O, O]),
    row(
        1,
        0,
        [
            e(24, 1, 1, 1, &[&[-68, 159]]),
            e(-12, 1, 1, 0, &[&[-88, 212, 15]]),
            e(-90, 1, 2, 0, &[]),
        ],
    ),
    row(
        1,
        1,
        [
            e(24, 1, 1, 0, &[&[-136, 100, 207]]),
            e(24, 1, 1, 0, &[&[152, -384, 81]]),
            e(-180, 1, 2, 0, &[]),
        ],
    ),
    row(
        1,
        2,
        [
            e(-72, 1, 1, 0, &[&[168, -368, 229]]),
            e(24, 1, 1, 0, &[&[200, -560, 279]]),
            e(-216, 1, 2, 0, &[]),
        ],
    ),
    row(
        1,
        3,
        [
            e(-192, 1, 1, 0, &[&[60, -164, 117]]),
            e(288, 1, 1, 0, &[&[8, -24, 15]]),
            O,
        ],
    ),
    row(
        2,
        0,
        [
            e(-144, 1, 0, 0, &[&[-136, 680, -1087, 552]]),
            e(96, 1, 0, 0, &[&[64, -127, -60, 126]]),
            e(27, 1, 1, 0, &[&[-34, 35]]),
        ],
    ),
    row(
        2,
        1,
        [
            e(-144, 1, 0, 0, &[&[-256, 1324, -2091, 1065]]),
            e(192, 1, 0, 0, &[&[88, -217, 87, 45]]),
            e(-1728, 2, 1, 0, &[]),
        ],
    ),
    row(
        2,
        2,
        [
            e(-432, 1, 0, 1, &[&[16, -61, 61]]),
            e(288, 2, 0, 0, &[&[56, -128, 57]]),
            e(-1296, 2, 1, 0, &[]),
        ],
    ),
    row(
        3,
        0,
        [
            e(864, 2, 0, 0, &[&[100, -296, 211]]),
            e(-1728, 2, 0, 1, &[&[-19, 22]]),
            e(648, 2, 0, 0, &[&[-6, 7]]),
        ],
    ),
    row(
        3,
        1,
        [
            e(3456, 2, 0, 0, &[&[32, -85, 62]]),
            e(-1152, 2, 0, 0, &[&[-4, -17, 27]]),
            e(-5184, 3, 0, 0, &[]),
        ],
    ),
    row(
        4,
        0,
        [
            e(-10368, 3, 0, 0, &[&[-10, 13]]),
            e(6912, 3, 0, 0, &[&[-2, 5]]),
            e(-3888, 3, 0, 0, &[]),
        ],
    ),
];

/// Brouwer comparison polynomials b_{j,i}: (j, i, entry).
pub static BROUWER_LONG_PERIOD: [(usize, usize, Entry); 5] = [
    (1, 0, e(-2, 0, 0, 0, &[&[16, 2928, -6870, 3975]])),
    (1, 1, e(2, 0, 0, 0, &[&[-2320, 6288, -5370, 1425]])),
    (1, 2, e(-2, 0, 0, 0, &[&[-14, 15], &[184, -388, 195]])),
    (1, 3, e(2, 0, 0, 0, &[&[-14, 15], &[-56, 36, 45]])),
    (2, 0, e(1, 0, 0, 0, &[&[-14, 15], &[-14, 15], &[-13, 15]])),
];

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl Entry {
    pub fn is_zero(&self) -> bool {
        self.scale == 0
    }

    /// Exact ascending coefficients in s².
    pub fn expand(&self) -> Vec<i128> {
        if self.is_zero() {
            return vec![0];
        }
        let mut poly = vec![i128::from(self.scale)];
        for _ in 0..self.c2 {
            poly = poly_mul(&poly, &[1, -1]);
        }
        for _ in 0..self.f {
            poly = poly_mul(&poly, &[2, -3]);
        }
        for _ in 0..self.s2 {
            poly = poly_mul(&poly, &[0, 1]);
        }
        for factor in self.factors {
            let factor: Vec<i128> = factor.iter().map(|&c| i128::from(c)).collect();
            poly = poly_mul(&poly, &factor);
        }
        while poly.len() > 1 && poly[poly.len() - 1] == 0 {
            poly.pop();
        }
        poly
    }

    pub fn eval(&self, s2: f64) -> f64 {
        self.eval_factored(&InclinationPowers::new(s2))
    }

    /// Evaluation in factored form, which avoids the cancellation of the
    /// expanded polynomial near s² = 2/3.
    pub fn eval_factored<S: Scalar>(&self, pw: &InclinationPowers<S>) -> S {
        if self.is_zero() {
            return S::cst(0.0);
        }
        let mut v = pw.c2[self.c2 as usize]
            * pw.f[self.f as usize]
            * pw.s2[self.s2 as usize]
            * self.scale as f64;
        for factor in self.factors {
            let mut poly = S::cst(0.0);
            for &c in factor.iter().rev() {
                poly = poly * pw.s2[1] + c as f64;
            }
            v = v * poly;
        }
        v
    }

    /// Human-readable factored form, e.g. `-72(2-3s²)^3 s^4`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = self.scale.to_string();
        if self.c2 > 0 {
            out.push_str(&format!(" c^{}", 2 * self.c2));
        }
        if self.f > 0 {
            out.push_str(&format!(" (2-3s^2)^{}", self.f));
        }
        if self.s2 > 0 {
            out.push_str(&format!(" s^{}", 2 * self.s2));
        }
        for factor in self.factors {
            out.push_str(&format!(
                " ({})",
                render_poly(&factor.iter().map(|&c| i128::from(c)).collect::<Vec<_>>())
            ));
        }
        out
    }
}

/// Descending-power rendering of an ascending s²-polynomial.
pub fn render_poly(coeffs: &[i128]) -> String {
    let mut out = String::new();
    for (power, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 {
            "-"
        } else if out.is_empty() {
            ""
        } else {
            "+"
        };
        let mag = c.abs();
        let body = match (power, mag) {
            (0, m) => m.to_string(),
            (p, 1) => format!("s^{}", 2 * p),
            (p, m) => format!("{m}s^{}", 2 * p),
        };
        out.push_str(sign);
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Expanded s²-polynomials, as floating coefficients ready for evaluation.
#[derive(Debug)]
pub struct CoefficientTables {
    /// (i, j, [k=0, k=1, k=2]).
    pub q: Vec<(usize, usize, [Vec<f64>; 3])>,
    /// (i, j, [(1,0), (1,1), (2,0)]).
    pub b: Vec<(usize, usize, [Vec<f64>; 3])>,
    /// (j, i, polynomial).
    pub brouwer: Vec<(usize, usize, Vec<f64>)>,
}

fn to_f64(poly: Vec<i128>) -> Vec<f64> {
    poly.into_iter().map(|c| c as f64).collect()
}

fn expand_rows(rows: &[Row]) -> Vec<(usize, usize, [Vec<f64>; 3])> {
    rows.iter()
        .map(|r| (r.i, r.j, r.cols.map(|c| to_f64(c.expand()))))
        .collect()
}

pub fn coefficient_tables() -> &'static CoefficientTables {
    static TABLES: OnceLock<CoefficientTables> = OnceLock::new();
    TABLES.get_or_init(|| CoefficientTables {
        q: expand_rows(&SECULAR_THIRD_ORDER),
        b: expand_rows(&LONG_PERIOD_SECOND_ORDER),
        brouwer: BROUWER_LONG_PERIOD
            .iter()
            .map(|(j, i, entry)| (*j, *i, to_f64(entry.expand())))
            .collect(),
    })
}

/// Sum of absolute values of all expanded integer coefficients.
pub fn checksum() -> i128 {
    let rows = SECULAR_THIRD_ORDER
        .iter()
        .chain(LONG_PERIOD_SECOND_ORDER.iter());
    let tables: i128 = rows
        .flat_map(|r| r.cols.iter())
        .map(|c| c.expand().iter().map(|x| x.abs()).sum::<i128>())
        .sum();
    let brouwer: i128 = BROUWER_LONG_PERIOD
        .iter()
        .map(|(_, _, c)| c.expand().iter().map(|x| x.abs()).sum::<i128>())
        .sum();
    tables + brouwer
}

/// Text rendering in the row order of the printed tables, with expansions.
pub fn render_tables() -> String {
    let mut out = String::new();
    let sections: [(&str, &[Row], [&str; 3]); 2] = [
        ("q_{k,i,j}", &SECULAR_THIRD_ORDER, ["k=0", "k=1", "k=2"]),
        (
            "b_{l,k,i,j}",
            &LONG_PERIOD_SECOND_ORDER,
            ["l=1,k=0", "l=1,k=1", "l=2,k=0"],
        ),
    ];
    for (name, rows, headers) in sections {
        let _ = writeln!(out, "# {name}   (c^2 = 1 - s^2)");
        for r in rows {
            for (col, header) in r.cols.iter().zip(headers) {
                let _ = writeln!(
                    out,
                    "{},{}  {:<8} {:<48} = {}",
                    r.i,
                    r.j,
                    header,
                    col.render(),
                    render_poly(&col.expand())
                );
            }
        }
        out.push('\n');
    }
    let _ = writeln!(out, "# brouwer b_{{j,i}}");
    for (j, i, entry) in &BROUWER_LONG_PERIOD {
        let _ = writeln!(
            out,
            "{j},{i}  {:<48} = {}",
            entry.render(),
            render_poly(&entry.expand())
        );
    }
    let _ = writeln!(out, "\n# checksum {}", checksum());
    out
}
