//! Admissibility oracle for the convolution and multiplication estimates.
//!
//! Every checker records each comparison it performs in a [`ConditionTrace`].
//! Conditions come in three roles: hypotheses that are only known to be
//! sufficient, conditions that are sufficient and whose non-strict form is
//! also necessary, and informational entries (strictness triggers).

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{format_rational, rat, remark_bound, young_functional, Exponent, ParamTuple, Rational, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: Rational, rhs: Rational) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    fn relaxed(self) -> Relation {
        match self {
            Relation::Gt => Relation::Ge,
            Relation::Lt => Relation::Le,
            other => other,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionRole {
    /// Part of the sufficient hypotheses only.
    Hypothesis,
    /// Sufficient; its non-strict form is also necessary.
    Necessary,
    /// Recorded for the reader, never decides the verdict.
    Informational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub id: String,
    #[serde(with = "rational_str")]
    pub lhs: Rational,
    pub relation: Relation,
    #[serde(with = "rational_str")]
    pub rhs: Rational,
    pub satisfied: bool,
    pub strictness_required: bool,
    pub role: ConditionRole,
}

impl Condition {
    /// True when the non-strict form of a necessary condition fails.
    pub fn necessary_violated(&self) -> bool {
        self.role == ConditionRole::Necessary && !self.relation.relaxed().holds(self.lhs, self.rhs)
    }

    pub fn decides(&self) -> bool {
        self.role != ConditionRole::Informational
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<34} {:>8} {:<2} {:<8} {}{}",
            self.id,
            format_rational(&self.lhs),
            self.relation.symbol(),
            format_rational(&self.rhs),
            match (self.role, self.satisfied) {
                (ConditionRole::Informational, true) => "yes",
                (ConditionRole::Informational, false) => "no",
                (_, true) => "ok",
                (_, false) => "VIOLATED",
            },
            if self.strictness_required { " (strict)" } else { "" }
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConditionTrace {
    conditions: Vec<Condition>,
}

impl ConditionTrace {
    fn record(
        &mut self,
        id: impl Into<String>,
        lhs: Rational,
        relation: Relation,
        rhs: Rational,
        strictness_required: bool,
        role: ConditionRole,
    ) -> bool {
        let id = id.into();
        debug_assert!(self.get(&id).is_none(), "condition {id} recorded twice");
        let satisfied = relation.holds(lhs, rhs);
        self.conditions.push(Condition {
            id,
            lhs,
            relation,
            rhs,
            satisfied,
            strictness_required,
            role,
        });
        satisfied
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn get(&self, id: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.id == id)
    }

    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    pub fn all_decisive_hold(&self) -> bool {
        self.conditions.iter().filter(|c| c.decides()).all(|c| c.satisfied)
    }

    pub fn necessary_violations(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| c.necessary_violated())
    }

    pub fn unsatisfied(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| c.decides() && !c.satisfied)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Bounded,
    Unbounded,
    Undetermined,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Bounded => "bounded",
            Classification::Unbounded => "unbounded",
            Classification::Undetermined => "undetermined",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Weighted Lebesgue convolution.
    Convolution,
    /// Fourier–Lebesgue multiplication.
    Multiplication,
    ModulationConvolutionM,
    ModulationConvolutionW,
    ModulationMultiplicationM,
    ModulationMultiplicationW,
    /// The Hölder-on-Young estimate with strict inequalities.
    WeakYoung,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Convolution,
    Multiplication,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    M,
    W,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub classification: Classification,
    pub theorem: Theorem,
    pub trace: ConditionTrace,
}

impl Verdict {
    fn from_trace(theorem: Theorem, trace: ConditionTrace) -> Self {
        let classification = if trace.all_decisive_hold() {
            Classification::Bounded
        } else if trace.necessary_violations().next().is_some() {
            Classification::Unbounded
        } else {
            Classification::Undetermined
        };
        Verdict {
            classification,
            theorem,
            trace,
        }
    }

    /// Conditions responsible for the verdict: the violated necessary
    /// conditions for `Unbounded`, the failing hypotheses for
    /// `Undetermined`, nothing for `Bounded`.
    pub fn binding_conditions(&self) -> Vec<&Condition> {
        match self.classification {
            Classification::Bounded => Vec::new(),
            Classification::Unbounded => self.trace.necessary_violations().collect(),
            Classification::Undetermined => self.trace.unsatisfied().collect(),
        }
    }

    pub fn cites(&self, id_prefix: &str) -> bool {
        self.binding_conditions().iter().any(|c| c.id.starts_with(id_prefix))
    }
}

/// Upper end of the admissible window for the Young functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeBound {
    /// `R <= 1/2`.
    Half,
    /// `R <= max(1/2, min(1/e0, 1/e1, 1/e2))`.
    Relaxed,
}

impl RangeBound {
    fn value(self, exps: [Exponent; 3]) -> Rational {
        match self {
            RangeBound::Half => rat(1, 2),
            RangeBound::Relaxed => remark_bound(exps),
        }
    }
}

/// Which side of the parameter tuple a condition system reads.
#[derive(Clone, Copy)]
struct Side {
    exp: char,
    weight: char,
    alt_weight: char,
}

const SPACE_SIDE: Side = Side {
    exp: 'p',
    weight: 't',
    alt_weight: 's',
};
const FREQUENCY_SIDE: Side = Side {
    exp: 'q',
    weight: 's',
    alt_weight: 't',
};

fn weights(params: &ParamTuple, c: char) -> [Rational; 3] {
    let w: [Weight; 3] = if c == 't' { params.t } else { params.s };
    w.map(|v| v.value())
}

fn exponents(params: &ParamTuple, c: char) -> [Exponent; 3] {
    if c == 'p' {
        params.p
    } else {
        params.q
    }
}

/// Records the range window, the pairwise weight sums and the critical sum
/// with its strictness clause.
fn critical_system(trace: &mut ConditionTrace, params: &ParamTuple, side: Side, bound: RangeBound) {
    let exps = exponents(params, side.exp);
    let w = weights(params, side.weight);
    let alt = weights(params, side.alt_weight);
    let young = young_functional(exps);
    let zero = Rational::zero();
    let (e, x, y) = (side.exp, side.weight, side.alt_weight);

    trace.record(format!("young_lower[{e}]"), young, Relation::Ge, zero, false, ConditionRole::Hypothesis);
    trace.record(
        format!("young_upper[{e}]"),
        young,
        Relation::Le,
        bound.value(exps),
        false,
        ConditionRole::Hypothesis,
    );
    for (j, k) in [(0, 1), (0, 2), (1, 2)] {
        trace.record(
            format!("pair[{x}{j}+{x}{k}]"),
            w[j] + w[k],
            Relation::Ge,
            zero,
            false,
            ConditionRole::Necessary,
        );
    }

    let critical = Rational::from_integer(params.d as i64) * young;
    let positive = trace.record(
        format!("strict_trigger[R({e})>0]"),
        young,
        Relation::Gt,
        zero,
        false,
        ConditionRole::Informational,
    );
    let mut hit = false;
    for j in 0..3 {
        hit |= trace.record(
            format!("strict_trigger[{x}{j}=d*R({e})]"),
            w[j],
            Relation::Eq,
            critical,
            false,
            ConditionRole::Informational,
        );
    }
    // Alternative reading of the trigger through the other weight family;
    // recorded only.
    for j in 0..3 {
        trace.record(
            format!("strict_trigger_alt[{y}{j}=d*R({e})]"),
            alt[j],
            Relation::Eq,
            critical,
            false,
            ConditionRole::Informational,
        );
    }
    let strict = positive && hit;
    trace.record(
        format!("critical_sum[{x}]"),
        w[0] + w[1] + w[2],
        if strict { Relation::Gt } else { Relation::Ge },
        critical,
        strict,
        ConditionRole::Necessary,
    );
}

/// Weighted Lebesgue convolution `L^{p1}_{t1} * L^{p2}_{t2} -> L^{p0'}_{-t0}`.
pub fn check_convolution(params: &ParamTuple) -> Verdict {
    check_convolution_with(params, RangeBound::Half)
}

/// As [`check_convolution`] with a chosen upper end of the range window.
pub fn check_convolution_with(params: &ParamTuple, bound: RangeBound) -> Verdict {
    let mut trace = ConditionTrace::default();
    critical_system(&mut trace, params, SPACE_SIDE, bound);
    Verdict::from_trace(Theorem::Convolution, trace)
}

/// Fourier–Lebesgue multiplication `FL^{q1}_{s1} . FL^{q2}_{s2} -> FL^{q0'}_{-s0}`.
pub fn check_multiplication(params: &ParamTuple) -> Verdict {
    let mut trace = ConditionTrace::default();
    critical_system(&mut trace, params, FREQUENCY_SIDE, RangeBound::Half);
    Verdict::from_trace(Theorem::Multiplication, trace)
}

/// Convolution or multiplication between modulation spaces of type `M` or
/// `W`. Both spaces share the same conditions.
pub fn check_modulation(params: &ParamTuple, flavor: Flavor, space: Space) -> Verdict {
    let (main, other) = match flavor {
        Flavor::Convolution => (SPACE_SIDE, FREQUENCY_SIDE),
        Flavor::Multiplication => (FREQUENCY_SIDE, SPACE_SIDE),
    };
    let mut trace = ConditionTrace::default();
    critical_system(&mut trace, params, main, RangeBound::Half);
    let e = other.exp;
    trace.record(
        format!("young_cap[{e}]"),
        young_functional(exponents(params, e)),
        Relation::Le,
        Rational::one(),
        false,
        ConditionRole::Hypothesis,
    );
    let w = weights(params, other.weight);
    trace.record(
        format!("total[{}]", other.weight),
        w[0] + w[1] + w[2],
        Relation::Ge,
        Rational::zero(),
        false,
        ConditionRole::Hypothesis,
    );
    let theorem = match (flavor, space) {
        (Flavor::Convolution, Space::M) => Theorem::ModulationConvolutionM,
        (Flavor::Convolution, Space::W) => Theorem::ModulationConvolutionW,
        (Flavor::Multiplication, Space::M) => Theorem::ModulationMultiplicationM,
        (Flavor::Multiplication, Space::W) => Theorem::ModulationMultiplicationW,
    };
    Verdict::from_trace(theorem, trace)
}

/// The estimate obtained from Hölder's inequality applied to Young's
/// inequality: `0 < R(p) <= 1/2`, at least two strict pairwise sums and a
/// strict critical sum. Failing it says nothing about unboundedness.
pub fn check_weak_proposition(params: &ParamTuple) -> Verdict {
    let mut trace = ConditionTrace::default();
    let young = params.r_p();
    let t = weights(params, 't');
    let zero = Rational::zero();
    trace.record("young_lower_strict[p]", young, Relation::Gt, zero, false, ConditionRole::Hypothesis);
    trace.record("young_upper[p]", young, Relation::Le, rat(1, 2), false, ConditionRole::Hypothesis);
    let mut strict_pairs = 0;
    for (j, k) in [(0, 1), (0, 2), (1, 2)] {
        let sum = t[j] + t[k];
        trace.record(format!("pair[t{j}+t{k}]"), sum, Relation::Ge, zero, false, ConditionRole::Hypothesis);
        if sum > zero {
            strict_pairs += 1;
        }
    }
    trace.record(
        "strict_pairs[t]",
        Rational::from_integer(strict_pairs),
        Relation::Ge,
        Rational::from_integer(2),
        false,
        ConditionRole::Hypothesis,
    );
    trace.record(
        "critical_sum_strict[t]",
        t[0] + t[1] + t[2],
        Relation::Gt,
        Rational::from_integer(params.d as i64) * young,
        true,
        ConditionRole::Hypothesis,
    );
    Verdict::from_trace(Theorem::WeakYoung, trace)
}

/// Sufficient conditions under which the restricted pieces `T_{F_j}` of the
/// weighted convolution are bounded. `item` 1 covers regions 1 and 2, items
/// 2, 3 and 4 cover regions 3, 4 and 5.
pub fn region_item_conditions(item: u8, params: &ParamTuple) -> (bool, ConditionTrace) {
    assert!((1..=4).contains(&item), "items are numbered 1..=4");
    let mut trace = ConditionTrace::default();
    let young = params.r_p();
    let x = params.p.map(|e| e.reciprocal());
    let t = weights(params, 't');
    let zero = Rational::zero();
    let critical = Rational::from_integer(params.d as i64) * young;
    let sum = t[0] + t[1] + t[2];
    let h = ConditionRole::Hypothesis;
    trace.record("young_lower[p]", young, Relation::Ge, zero, false, h);
    match item {
        1 => {
            trace.record("young_vs_p0", young, Relation::Le, x[0], false, h);
            trace.record("pair[t0+t1]", t[0] + t[1], Relation::Ge, zero, false, h);
            trace.record("pair[t0+t2]", t[0] + t[2], Relation::Ge, zero, false, h);
            let strict = t[1] == critical || t[2] == critical;
            let rel = if strict { Relation::Gt } else { Relation::Ge };
            trace.record("critical_sum[t]", sum, rel, critical, strict, h);
        }
        2 => {
            let bound = if x[1] > rat(1, 2) && x[2] > rat(1, 2) {
                x[1].min(x[2])
            } else {
                rat(1, 2)
            };
            trace.record("young_upper[p]", young, Relation::Le, bound, false, h);
            trace.record("pair[t1+t2]", t[1] + t[2], Relation::Ge, zero, false, h);
        }
        3 | 4 => {
            let xj = if item == 3 { x[2] } else { x[1] };
            trace.record("young_upper[p]", young, Relation::Le, xj.max(rat(1, 2)), false, h);
            let strict = t[0] == critical;
            let rel = if strict { Relation::Gt } else { Relation::Ge };
            trace.record("pair[t1+t2]", t[1] + t[2], rel, zero, strict, h);
            trace.record("critical_sum[t]", sum, Relation::Ge, critical, false, h);
        }
        _ => unreachable!(),
    }
    (trace.all_decisive_hold(), trace)
}

pub(crate) mod rational_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::exponent::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Weight;

    fn e(n: i64) -> Exponent {
        Exponent::int(n)
    }

    fn w(n: i64, d: i64) -> Weight {
        Weight::new(n, d)
    }

    fn conv(p: [Exponent; 3], t: [Weight; 3]) -> Verdict {
        check_convolution(&ParamTuple::new(1).with_p(p).with_t(t))
    }

    #[test]
    fn convolution_classical_young() {
        let v = conv([e(2), e(1), e(2)], [Weight::zero(); 3]);
        assert_eq!(v.classification, Classification::Bounded);
    }

    #[test]
    fn convolution_equality_branch() {
        let v = conv([e(2); 3], [w(1, 6); 3]);
        assert_eq!(v.classification, Classification::Bounded);
        let c = v.trace.get("critical_sum[t]").unwrap();
        assert!(!c.strictness_required);
        assert_eq!(c.lhs, c.rhs);
    }

    #[test]
    fn convolution_critical_sum_violation_is_unbounded() {
        let v = conv([e(2); 3], [Weight::zero(); 3]);
        assert_eq!(v.classification, Classification::Unbounded);
        assert!(v.cites("critical_sum"));
    }

    #[test]
    fn convolution_strictness_triggered_and_met() {
        let v = conv([e(2); 3], [w(1, 2); 3]);
        assert_eq!(v.classification, Classification::Bounded);
        let c = v.trace.get("critical_sum[t]").unwrap();
        assert!(c.strictness_required);
        assert_eq!(c.relation, Relation::Gt);
    }

    #[test]
    fn convolution_strictness_boundary_is_undetermined() {
        // t0 = d R(p) = 1/2 and the sum equals 1/2 exactly.
        let v = conv([e(2); 3], [w(1, 2), w(0, 1), w(0, 1)]);
        assert_eq!(v.classification, Classification::Undetermined);
    }

    #[test]
    fn convolution_out_of_range_is_undetermined() {
        // R(p) = 3/4 with every necessary condition holding.
        let v = conv([e(2), e(2), e(4)], [w(1, 1); 3]);
        assert_eq!(v.trace.get("young_upper[p]").unwrap().lhs, rat(3, 4));
        assert_eq!(v.classification, Classification::Undetermined);
    }

    #[test]
    fn multiplication_examples() {
        let base = ParamTuple::new(1);
        let v = check_multiplication(&base.with_q([e(2), e(1), e(2)]));
        assert_eq!(v.classification, Classification::Bounded);
        let v = check_multiplication(&base.with_s([w(1, 6); 3]));
        assert_eq!(v.classification, Classification::Bounded);
        let v = check_multiplication(&base.with_s([w(1, 1), w(-2, 1), w(0, 1)]));
        assert_eq!(v.classification, Classification::Unbounded);
        assert!(v.cites("pair[s1+s2]"));
    }

    #[test]
    fn modulation_examples() {
        let params = ParamTuple::new(1).with_p([e(2), e(1), e(2)]).with_q([e(1); 3]);
        let v = check_modulation(&params, Flavor::Convolution, Space::M);
        assert_eq!(v.classification, Classification::Bounded);

        let params = ParamTuple::new(1).with_s([w(1, 6); 3]).with_t([w(1, 6); 3]);
        let v = check_modulation(&params, Flavor::Convolution, Space::M);
        assert_eq!(v.classification, Classification::Bounded);
    }

    #[test]
    fn modulation_cap_and_total_are_hypotheses_only() {
        // R(q) = 2 > 1 and s sums negative: not bounded, but not unbounded either.
        let params = ParamTuple::new(1)
            .with_p([e(2), e(1), e(2)])
            .with_q([Exponent::INF; 3])
            .with_s([w(-1, 1), w(0, 1), w(0, 1)]);
        let v = check_modulation(&params, Flavor::Convolution, Space::W);
        assert_eq!(v.classification, Classification::Undetermined);
    }

    #[test]
    fn weak_proposition_examples() {
        let base = ParamTuple::new(1);
        assert_eq!(
            check_weak_proposition(&base.with_t([w(1, 6); 3])).classification,
            Classification::Undetermined
        );
        assert_eq!(
            check_weak_proposition(&base.with_t([w(1, 1); 3])).classification,
            Classification::Bounded
        );
        let young = base.with_p([e(2), e(1), e(2)]);
        assert_eq!(check_weak_proposition(&young).classification, Classification::Undetermined);
    }

    #[test]
    fn trace_ids_are_unique() {
        let params = ParamTuple::new(2).with_t([w(1, 2); 3]);
        for v in [
            check_convolution(&params),
            check_multiplication(&params),
            check_modulation(&params, Flavor::Multiplication, Space::W),
            check_weak_proposition(&params),
        ] {
            let mut ids: Vec<_> = v.trace.conditions().iter().map(|c| c.id.clone()).collect();
            let n = ids.len();
            ids.sort();
            ids.dedup();
            assert_eq!(ids.len(), n);
        }
    }

    #[test]
    fn dimension_scales_the_critical_sum() {
        let params = ParamTuple::new(2).with_t([w(1, 6); 3]);
        assert_eq!(check_convolution(&params).classification, Classification::Unbounded);
        let params = ParamTuple::new(2).with_t([w(1, 3); 3]);
        assert_eq!(check_convolution(&params).classification, Classification::Bounded);
    }

    #[test]
    fn region_items_examples() {
        let params = ParamTuple::new(1).with_t([w(1, 1); 3]);
        for item in 1..=4 {
            assert!(region_item_conditions(item, &params).0, "item {item}");
        }
        let params = ParamTuple::new(1).with_t([w(1, 1), w(-1, 1), w(0, 1)]);
        assert!(!region_item_conditions(3, &params).0);
    }
}
