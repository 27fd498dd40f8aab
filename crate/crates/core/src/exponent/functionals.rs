use num_traits::{One, Zero};

use super::{rat, Exponent, Rational};

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn half() -> Rational {
    rat(1, 2)
}

/// Conjugate exponent: `1/p + 1/p' = 1`.
pub fn conjugate(p: Exponent) -> Exponent {
    let x = Rational::one() - p.reciprocal();
    Exponent::from_reciprocal(x).expect("1 - 1/p lies in [0, 1] for p in [1, inf]")
}

/// `2 - 1/p0 - 1/p1 - 1/p2`.
pub fn young_functional(p: [Exponent; 3]) -> Rational {
    g_functional(p.map(|e| e.reciprocal()))
}

/// `2 - x0 - x1 - x2`.
pub fn g_functional(x: [Rational; 3]) -> Rational {
    rat(2, 1) - x[0] - x[1] - x[2]
}

/// Max over all orderings of `min(x_a, max(1/2, min(x_b, x_c)))`, evaluated
/// literally over the six permutations.
pub fn h0(x: [Rational; 3]) -> Rational {
    PERMUTATIONS
        .iter()
        .map(|&[a, b, c]| x[a].min(half().max(x[b].min(x[c]))))
        .max()
        .expect("six permutations")
}

/// Piecewise form: max of the coordinates when all lie below 1/2, min when
/// all lie above, and 1/2 otherwise.
pub fn h1(x: [Rational; 3]) -> Rational {
    let h = half();
    if x.iter().all(|v| *v < h) {
        x[0].max(x[1]).max(x[2])
    } else if x.iter().all(|v| *v > h) {
        x[0].min(x[1]).min(x[2])
    } else {
        h
    }
}

/// `max(1/2, min(x0, x1, x2))`.
pub fn h2(x: [Rational; 3]) -> Rational {
    half().max(x[0].min(x[1]).min(x[2]))
}

/// True when `h0 == h1` and, for every `l`, the window `0 <= G <= 1/2` is
/// equivalent to `0 <= G <= H_l`.
pub fn lemma_equivalence_holds(x: [Rational; 3]) -> bool {
    let g = g_functional(x);
    let zero = Rational::zero();
    let base = zero <= g && g <= half();
    let hs = [h0(x), h1(x), h2(x)];
    hs[0] == hs[1] && hs.iter().all(|&h| (zero <= g && g <= h) == base)
}

/// Relaxed upper bound `max(1/2, min(1/p0, 1/p1, 1/p2))` for the Young
/// functional.
pub fn remark_bound(p: [Exponent; 3]) -> Rational {
    h2(p.map(|e| e.reciprocal()))
}
