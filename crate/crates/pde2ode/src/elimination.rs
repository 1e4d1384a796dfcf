//! Differential reduction and the generic-case RIF-style completion.
//!
//! A completed form consists of solved leading-linear rules, leading-
//! nonlinear constraints and pivot inequations. `reduce` rewrites a
//! differential polynomial into normal form modulo such a form, and `rif`
//! runs the completion loop: normalize, solve or constrain, prolong, and
//! close integrability conditions between rules.

use std::collections::{BTreeSet, VecDeque};

use crate::diffpoly::{Derivative, DiffPolynomial, RationalExpr, SystemSignature};
use crate::error::{Error, Result};
use crate::parse::SystemSource;
use crate::ranking::Ranking;

/// A solved leading-linear equation `lead = rhs`, valid where `pivot != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lead: Derivative,
    pub rhs: RationalExpr,
    /// the (non-constant) initial divided by when solving, if any
    pub pivot: Option<DiffPolynomial>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RifStatus {
    Complete,
    IterationCapped,
}

/// Output of the completion: rules, constraints (`= 0`), inequations (`!= 0`).
#[derive(Debug, Clone)]
pub struct RifForm {
    pub signature: SystemSignature,
    pub ranking: Ranking,
    pub rules: Vec<Rule>,
    pub constraints: Vec<DiffPolynomial>,
    pub inequations: Vec<DiffPolynomial>,
    pub status: RifStatus,
}

impl RifForm {
    pub fn empty(signature: SystemSignature, ranking: Ranking) -> Self {
        RifForm {
            signature,
            ranking,
            rules: Vec::new(),
            constraints: Vec::new(),
            inequations: Vec::new(),
            status: RifStatus::Complete,
        }
    }

    pub fn max_rule_order(&self) -> u32 {
        self.rules
            .iter()
            .map(|r| r.lead.order().max(r.rhs.max_order()))
            .chain(self.constraints.iter().map(|c| c.max_order()))
            .max()
            .unwrap_or(0)
    }

    fn find_rule(&self, theta: &Derivative) -> Option<usize> {
        self.rules
            .iter()
            .position(|r| theta.is_derivative_of(&r.lead))
    }
}

/// Result of a reduction: the normal form and the pivots divided by.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub expr: RationalExpr,
    pub used_pivots: Vec<DiffPolynomial>,
}

/// Normal form of `p` modulo the rules and constraints of `f`. The value of
/// `p` is preserved on the solution set away from the pivots.
pub fn reduce(p: &DiffPolynomial, f: &RifForm) -> Result<Reduction> {
    let cap = p.max_order().max(f.max_rule_order()) + DEFAULT_PROLONGATION_CAP;
    reduce_with_cap(&RationalExpr::from_poly(p.clone()), f, cap)
}

/// Normal form of `p = 0` viewed as an equation: in addition to rewriting,
/// denominators and factors known to be nonzero (the recorded inequations)
/// are stripped, so the result is equivalent to `p = 0` on the generic
/// branch but may differ from `p` by a nonzero factor.
pub fn reduce_equation(p: &DiffPolynomial, f: &RifForm, cap_order: u32) -> Result<Reduction> {
    reduce_core(
        p.clone(),
        DiffPolynomial::one(),
        f,
        cap_order,
        true,
    )
}

pub const DEFAULT_PROLONGATION_CAP: u32 = 4;

/// Normal form of a rational expression modulo `f`, with an order cap.
pub fn reduce_with_cap(e: &RationalExpr, f: &RifForm, cap_order: u32) -> Result<Reduction> {
    reduce_core(e.num.clone(), e.den.clone(), f, cap_order, false)
}

fn reduce_core(
    num0: DiffPolynomial,
    den0: DiffPolynomial,
    f: &RifForm,
    cap_order: u32,
    equation_mode: bool,
) -> Result<Reduction> {
    let mut num = num0;
    let mut den = den0;
    let mut pivots: Vec<DiffPolynomial> = Vec::new();
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::NonTermination(cap_order));
        }
        // differential step: rewrite the ranking-maximal reducible derivative
        let mut target: Option<(Derivative, usize)> = None;
        for d in num.derivatives().chain(den.derivatives()) {
            if let Some(idx) = f.find_rule(d) {
                let better = match &target {
                    Some((t, _)) => f.ranking.compare(d, t) == std::cmp::Ordering::Greater,
                    None => true,
                };
                if better {
                    target = Some((d.clone(), idx));
                }
            }
        }
        if let Some((theta, ridx)) = target {
            let rule = &f.rules[ridx];
            let mut rhs = rule.rhs.clone();
            for i in 0..theta.idx.len() {
                for _ in 0..(theta.idx[i] - rule.lead.idx[i]) {
                    rhs = rhs.total_derivative(i);
                    if rhs.max_order() > cap_order {
                        return Err(Error::NonTermination(cap_order));
                    }
                }
            }
            if let Some(pv) = &rule.pivot {
                push_unique(&mut pivots, pv.clone());
            }
            if !rhs.den.is_constant() {
                push_unique(&mut pivots, normalize_pivot(&rhs.den, &f.ranking));
            }
            let ne = substitute(&num, &theta, &rhs);
            let de = substitute(&den, &theta, &rhs);
            let combined = RationalExpr::new(ne.num.mul(&de.den), ne.den.mul(&de.num));
            num = combined.num;
            den = combined.den;
            if num.max_order().max(den.max_order()) > cap_order {
                return Err(Error::NonTermination(cap_order));
            }
            continue;
        }
        // cancel pivot factors common to numerator and denominator
        for g in f.inequations.iter().chain(pivots.clone().iter()) {
            loop {
                match (
                    exact_div(&num, g, &f.ranking),
                    exact_div(&den, g, &f.ranking),
                ) {
                    (Some(qn), Some(qd)) => {
                        num = qn;
                        den = qd;
                        push_unique(&mut pivots, g.clone());
                    }
                    _ => break,
                }
            }
        }
        let mut changed = false;
        if equation_mode {
            // `p = 0` is unaffected by the nonzero denominator or by
            // nonzero factors of the numerator
            if !den.is_constant() {
                den = DiffPolynomial::one();
                changed = true;
            }
            for g in &f.inequations {
                while !num.is_zero() {
                    match exact_div(&num, g, &f.ranking) {
                        Some(q) => {
                            num = q;
                            push_unique(&mut pivots, g.clone());
                            changed = true;
                        }
                        None => break,
                    }
                }
            }
        }
        // algebraic step: multivariate division of the numerator by the
        // constraints, derivatives acting as indeterminates
        let reduced = divide_mod_constraints(&num, &f.constraints, &f.ranking);
        if reduced != num {
            num = reduced;
            changed = true;
        }
        if changed {
            continue;
        }
        break;
    }
    Ok(Reduction {
        expr: RationalExpr::new(num, den),
        used_pivots: pivots,
    })
}

/// Replace every occurrence of `theta` in `p` by the rational expression `r`,
/// clearing denominators exactly.
fn substitute(p: &DiffPolynomial, theta: &Derivative, r: &RationalExpr) -> RationalExpr {
    let k_max = p.degree_in(theta);
    if k_max == 0 {
        return RationalExpr::from_poly(p.clone());
    }
    let mut num = DiffPolynomial::zero();
    for k in 0..=k_max {
        let coeff = p.coefficient_of(theta, k);
        if coeff.is_zero() {
            continue;
        }
        num = num.add(&coeff.mul(&r.num.pow(k)).mul(&r.den.pow(k_max - k)));
    }
    RationalExpr::new(num, r.den.pow(k_max))
}

/// Exact division of `p` by a nonconstant `g` in the polynomial ring with
/// derivatives and independent variables as indeterminates. Returns `None`
/// when `g` does not divide `p`; any returned quotient satisfies `p = q g`
/// exactly.
pub fn exact_div(
    p: &DiffPolynomial,
    g: &DiffPolynomial,
    ranking: &Ranking,
) -> Option<DiffPolynomial> {
    if g.is_zero() || g.is_constant() {
        return None;
    }
    if p.is_zero() {
        return Some(DiffPolynomial::zero());
    }
    let lmg = ranking.leading_monomial(g)?.clone();
    let lcg = g.terms[&lmg].clone();
    let mut rem = p.clone();
    let mut quot = DiffPolynomial::zero();
    for _ in 0..10_000 {
        if rem.is_zero() {
            return Some(quot);
        }
        let lm = ranking.leading_monomial(&rem).unwrap().clone();
        let q = lm.try_div(&lmg)?;
        let c = &rem.terms[&lm] / &lcg;
        quot = quot.add(&DiffPolynomial::from_monomial(q.clone(), c.clone()));
        rem = rem.sub(&g.mul_monomial(&q, &c));
    }
    None
}

/// Full multivariate division of `p` by the constraint set.
fn divide_mod_constraints(
    p: &DiffPolynomial,
    constraints: &[DiffPolynomial],
    ranking: &Ranking,
) -> DiffPolynomial {
    let mut rem = p.clone();
    let lts: Vec<_> = constraints
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| {
            let lm = ranking.leading_monomial(c).unwrap().clone();
            let lc = c.terms[&lm].clone();
            (c, lm, lc)
        })
        .collect();
    'outer: loop {
        for (c, lm, lc) in &lts {
            for (m, coeff) in &rem.terms {
                if let Some(q) = m.try_div(lm) {
                    rem = rem.sub(&c.mul_monomial(&q, &(coeff / lc)));
                    continue 'outer;
                }
            }
        }
        return rem;
    }
}

/// Pivot normalization: primitive, positive leading coefficient, and a bare
/// monomial collapsed to its radical (`y^2 -> y`).
pub fn normalize_pivot(p: &DiffPolynomial, ranking: &Ranking) -> DiffPolynomial {
    let c = ranking.canonicalize_equation(p);
    if c.terms.len() == 1 {
        let (m, _) = c.terms.iter().next().unwrap();
        return DiffPolynomial::from_monomial(m.radical(), crate::diffpoly::rat_int(1));
    }
    c
}

fn push_unique(v: &mut Vec<DiffPolynomial>, p: DiffPolynomial) {
    if p.is_constant() {
        return;
    }
    if !v.contains(&p) {
        v.push(p);
    }
}

struct Completion {
    form: RifForm,
    queue: VecDeque<DiffPolynomial>,
    pairs_done: BTreeSet<(Derivative, Derivative)>,
    cap_order: u32,
    capped: bool,
}

impl Completion {
    fn reduce(&self, e: &RationalExpr) -> Result<Reduction> {
        reduce_with_cap(e, &self.form, self.cap_order)
    }

    fn reduce_eq(&self, p: &DiffPolynomial) -> Result<Reduction> {
        reduce_equation(p, &self.form, self.cap_order)
    }

    fn process_equation(&mut self, p: DiffPolynomial) -> Result<()> {
        let red = match self.reduce_eq(&p) {
            Ok(r) => r,
            Err(Error::NonTermination(_)) => {
                self.capped = true;
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        let nf = self.form.ranking.canonicalize_equation(&red.expr.num);
        if nf.is_zero() {
            return Ok(());
        }
        if nf.is_derivative_free() {
            // a nonzero polynomial in the independent variables alone cannot
            // vanish on an open domain
            return Err(Error::Inconsistent);
        }
        let lead = self.form.ranking.leading_derivative(&nf)?;
        if nf.degree_in(&lead) == 1 {
            let init = nf.coefficient_of(&lead, 1);
            let rest = nf.coefficient_of(&lead, 0);
            let pivot = if init.is_constant() {
                None
            } else {
                Some(normalize_pivot(&init, &self.form.ranking))
            };
            if let Some(pv) = &pivot {
                push_unique(&mut self.form.inequations, pv.clone());
            }
            self.add_rule(Rule {
                lead,
                rhs: RationalExpr::new(rest.neg(), init),
                pivot,
            })
        } else {
            self.add_constraint(nf)
        }
    }

    fn add_rule(&mut self, rule: Rule) -> Result<()> {
        // rules whose lead is a proper derivative of the new lead are no
        // longer reduced; requeue them as equations
        let mut requeue = Vec::new();
        let new_lead = rule.lead.clone();
        self.form.rules.retain(|r| {
            if r.lead.is_derivative_of(&new_lead) {
                requeue.push(rule_to_equation(r));
                false
            } else {
                true
            }
        });
        self.form.rules.push(rule);
        for q in requeue {
            self.queue.push_back(q);
        }
        self.pairs_done.clear();
        self.renormalize()
    }

    fn add_constraint(&mut self, c: DiffPolynomial) -> Result<()> {
        if self.form.constraints.contains(&c) {
            return Ok(());
        }
        self.form.constraints.push(c.clone());
        // prolong in every direction; each prolongation is linear in the
        // derivative of the lead with the separant as pivot
        for i in 0..self.form.signature.n_indep() {
            let pr = c.total_derivative(i);
            if pr.max_order() > self.cap_order {
                self.capped = true;
            } else {
                self.queue.push_back(pr);
            }
        }
        self.pairs_done.clear();
        self.renormalize()
    }

    /// Eager inter-reduction: bring every stored rule and constraint back to
    /// normal form with respect to the current set, requeueing anything whose
    /// shape changes materially.
    fn renormalize(&mut self) -> Result<()> {
        for _ in 0..100 {
            let mut changed = false;
            for i in 0..self.form.rules.len() {
                let rhs = self.form.rules[i].rhs.clone();
                let red = match self.reduce(&rhs) {
                    Ok(r) => r,
                    Err(Error::NonTermination(_)) => {
                        self.capped = true;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                if red.expr != rhs {
                    self.form.rules[i].rhs = red.expr;
                    changed = true;
                }
            }
            for i in (0..self.form.constraints.len()).rev() {
                let c = self.form.constraints.remove(i);
                let red = match self.reduce_eq(&c) {
                    Ok(r) => r,
                    Err(Error::NonTermination(_)) => {
                        self.capped = true;
                        self.form.constraints.insert(i, c);
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let nf = self.form.ranking.canonicalize_equation(&red.expr.num);
                if nf == c {
                    self.form.constraints.insert(i, c);
                } else {
                    changed = true;
                    if !nf.is_zero() {
                        self.queue.push_back(nf);
                    }
                }
            }
            if !changed {
                return Ok(());
            }
            self.pairs_done.clear();
        }
        self.capped = true;
        Ok(())
    }

    /// Cross-derivative (integrability) condition of a rule pair, reduced.
    fn pair_condition(&mut self, a: usize, b: usize) -> Result<Option<DiffPolynomial>> {
        let (la, lb) = (
            self.form.rules[a].lead.clone(),
            self.form.rules[b].lead.clone(),
        );
        let mu: Vec<u32> = la
            .idx
            .iter()
            .zip(lb.idx.iter())
            .map(|(x, y)| *x.max(y))
            .collect();
        if mu.iter().sum::<u32>() > self.cap_order {
            self.capped = true;
            return Ok(None);
        }
        let mut ea = self.form.rules[a].rhs.clone();
        let mut eb = self.form.rules[b].rhs.clone();
        for i in 0..mu.len() {
            for _ in 0..(mu[i] - la.idx[i]) {
                ea = ea.total_derivative(i);
            }
            for _ in 0..(mu[i] - lb.idx[i]) {
                eb = eb.total_derivative(i);
            }
        }
        let cond = ea.sub(&eb);
        let red = match self.reduce_eq(&cond.num) {
            Ok(r) => r,
            Err(Error::NonTermination(_)) => {
                self.capped = true;
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        let nf = self.form.ranking.canonicalize_equation(&red.expr.num);
        Ok(if nf.is_zero() { None } else { Some(nf) })
    }
}

fn rule_to_equation(r: &Rule) -> DiffPolynomial {
    r.rhs
        .den
        .mul(&DiffPolynomial::from_derivative(r.lead.clone()))
        .sub(&r.rhs.num)
}

/// Generic-case RIF-style completion of a system.
pub fn rif(src: &SystemSource, ranking: &Ranking, prolongation_cap: u32) -> Result<RifForm> {
    let input_order = src
        .equations
        .iter()
        .map(|e| e.max_order())
        .max()
        .unwrap_or(0);
    let mut st = Completion {
        form: RifForm::empty(src.signature.clone(), ranking.clone()),
        queue: src.equations.iter().cloned().collect(),
        pairs_done: BTreeSet::new(),
        cap_order: input_order + prolongation_cap,
        capped: false,
    };
    for g in &src.inequations {
        push_unique(
            &mut st.form.inequations,
            normalize_pivot(g, &st.form.ranking),
        );
    }
    let mut events = 0usize;
    loop {
        events += 1;
        if events > 20_000 {
            st.capped = true;
            break;
        }
        if let Some(p) = st.queue.pop_front() {
            st.process_equation(p)?;
            continue;
        }
        // integrability conditions between rule pairs on the same dependent
        // variable whose leads have a common derivative
        let mut progressed = false;
        let n = st.form.rules.len();
        'pairs: for a in 0..n {
            for b in (a + 1)..n {
                let (la, lb) = (st.form.rules[a].lead.clone(), st.form.rules[b].lead.clone());
                if la.dep != lb.dep {
                    continue;
                }
                let key = if la < lb {
                    (la.clone(), lb.clone())
                } else {
                    (lb.clone(), la.clone())
                };
                if st.pairs_done.contains(&key) {
                    continue;
                }
                st.pairs_done.insert(key);
                if let Some(cond) = st.pair_condition(a, b)? {
                    st.queue.push_back(cond);
                    progressed = true;
                    break 'pairs;
                }
            }
        }
        if !progressed && st.queue.is_empty() {
            break;
        }
    }
    let mut form = st.form;
    form.status = if st.capped {
        RifStatus::IterationCapped
    } else {
        RifStatus::Complete
    };
    // deterministic presentation: rules ascending by lead ranking
    let ranking = form.ranking.clone();
    form.rules.sort_by(|a, b| ranking.compare(&a.lead, &b.lead));
    form.constraints
        .sort_by(|a, b| match (ranking.leading_monomial(a), ranking.leading_monomial(b)) {
            (Some(x), Some(y)) => ranking.term_cmp(x, y),
            _ => std::cmp::Ordering::Equal,
        });
    Ok(form)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseVerdict {
    Consistent,
    Inconsistent,
    Unknown,
}

impl std::fmt::Display for CaseVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseVerdict::Consistent => write!(f, "consistent"),
            CaseVerdict::Inconsistent => write!(f, "inconsistent"),
            CaseVerdict::Unknown => write!(f, "unknown"),
        }
    }
}

/// Depth-1 probe of the discarded `pivot = 0` branch.
pub fn probe_pivot_case(
    src: &SystemSource,
    pivot: &DiffPolynomial,
    ranking: &Ranking,
    prolongation_cap: u32,
) -> CaseVerdict {
    let mut branch = src.clone();
    branch.equations.push(pivot.clone());
    branch.inequations.clear();
    match rif(&branch, ranking, prolongation_cap) {
        Ok(f) if f.status == RifStatus::Complete => CaseVerdict::Consistent,
        Ok(_) => CaseVerdict::Unknown,
        Err(Error::Inconsistent) => CaseVerdict::Inconsistent,
        Err(_) => CaseVerdict::Unknown,
    }
}
