//! Bounded three-valued model checking over `(Z; <, +, f)`.
//!
//! Existential quantifiers are gathered into blocks (a run of `E` plus any
//! `E` pulled out of the conjunction below it) and searched jointly. The
//! search pins variables forced by linear equations, narrows ranges from
//! linear inequalities, and indexes `f`-values for equations that can only
//! be solved by enumeration.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ast::{Formula, Term};
use crate::budget::TriState;
use crate::error::{Error, Result};
use crate::lexpr::LEFunction;
use crate::sequence::{IntSequence, RoundedSequence};

/// Budgets for one evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Unbounded quantifiers range over `[-bound, bound]`.
    pub bound: i64,
    /// Treat `[-bound, bound]` as the whole domain: exhausting it decides
    /// the quantifier instead of giving `unknown`.
    pub closed_world: bool,
    /// Total number of quantifier values tried before giving up.
    pub candidate_cap: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { bound: 1000, closed_world: false, candidate_cap: 50_000_000 }
    }
}

impl EvalOptions {
    pub fn with_bound(bound: i64) -> EvalOptions {
        EvalOptions { bound, ..EvalOptions::default() }
    }

    pub fn closed(mut self) -> EvalOptions {
        self.closed_world = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: TriState,
    /// Values of the outermost existential block when the result is true.
    pub witness: BTreeMap<String, BigInt>,
    /// Quantifier values tried.
    pub enumerated: u64,
}

pub fn evaluate(phi: &Formula, f: &LEFunction, env: &BTreeMap<String, BigInt>, opts: &EvalOptions) -> Result<Evaluation> {
    let seq = RoundedSequence::new(f.clone());
    evaluate_seq(phi, &seq, env, opts)
}

/// Evaluate over an arbitrary integer sequence standing in for `f`.
pub fn evaluate_seq(
    phi: &Formula,
    seq: &dyn IntSequence,
    env: &BTreeMap<String, BigInt>,
    opts: &EvalOptions,
) -> Result<Evaluation> {
    if opts.bound < 0 {
        return Err(Error::InvalidArgument(format!("bound must be non-negative, got {}", opts.bound)));
    }
    let unbound: Vec<String> = phi.free_vars().into_iter().filter(|v| !env.contains_key(v)).collect();
    if !unbound.is_empty() {
        return Err(Error::Scope(format!("no value for free variable(s): {}", unbound.join(", "))));
    }
    let mut c = Compiler { opts, names: Vec::new(), blocks: Vec::new() };
    let mut scope: Vec<(String, usize)> = Vec::new();
    let mut vals = Vec::new();
    for (name, v) in env {
        let id = c.new_var(name);
        scope.push((name.clone(), id));
        vals.push(Some(v.clone()));
    }
    let root = c.node(phi, &mut scope);
    vals.resize(c.names.len(), None);
    let Compiler { names, blocks, .. } = c;
    let mut ev = Evaluator {
        seq,
        opts,
        blocks: &blocks,
        vals,
        enumerated: 0,
        memo: HashMap::new(),
        index: HashMap::new(),
    };
    let (value, witness) = match &root {
        Node::Block(b) => {
            let r = ev.block(*b);
            (r.value, r.witness)
        }
        n => (ev.node(n), Vec::new()),
    };
    let witness = if value.is_true() {
        witness.into_iter().map(|(id, v)| (names[id].clone(), v)).collect()
    } else {
        BTreeMap::new()
    };
    Ok(Evaluation { value, witness, enumerated: ev.enumerated })
}

type VarId = usize;

#[derive(Clone, Debug, PartialEq)]
enum Summand {
    Var(VarId),
    App(Box<Lin>),
}

/// `konst + sum c_i s_i`.
#[derive(Clone, Debug, PartialEq, Default)]
struct Lin {
    konst: BigInt,
    terms: Vec<(BigInt, Summand)>,
}

impl Lin {
    fn push(&mut self, c: BigInt, s: Summand) {
        if c.is_zero() {
            return;
        }
        if let Some(i) = self.terms.iter().position(|(_, t)| *t == s) {
            self.terms[i].0 += c;
            if self.terms[i].0.is_zero() {
                self.terms.remove(i);
            }
        } else {
            self.terms.push((c, s));
        }
    }

    fn add_scaled(&mut self, other: &Lin, k: &BigInt) {
        self.konst += k * &other.konst;
        for (c, s) in &other.terms {
            self.push(k * c, s.clone());
        }
    }

    fn vars(&self, out: &mut BTreeSet<VarId>) {
        for (_, s) in &self.terms {
            match s {
                Summand::Var(v) => {
                    out.insert(*v);
                }
                Summand::App(a) => a.vars(out),
            }
        }
    }

    fn mentions(&self, x: VarId) -> bool {
        self.terms.iter().any(|(_, s)| match s {
            Summand::Var(v) => *v == x,
            Summand::App(a) => a.mentions(x),
        })
    }

    /// Coefficient of `x` if `x` occurs only outside applications.
    fn linear_coeff(&self, x: VarId) -> Option<BigInt> {
        let mut c = BigInt::zero();
        for (k, s) in &self.terms {
            match s {
                Summand::Var(v) if *v == x => c += k,
                Summand::App(a) if a.mentions(x) => return None,
                _ => {}
            }
        }
        Some(c)
    }

    /// Split into the part mentioning `x` and the rest.
    fn split(&self, x: VarId) -> (Lin, Lin) {
        let mut with = Lin::default();
        let mut without = Lin { konst: self.konst.clone(), terms: Vec::new() };
        for (c, s) in &self.terms {
            let hit = match s {
                Summand::Var(v) => *v == x,
                Summand::App(a) => a.mentions(x),
            };
            if hit {
                with.terms.push((c.clone(), s.clone()));
            } else {
                without.terms.push((c.clone(), s.clone()));
            }
        }
        (with, without)
    }
}

#[derive(Debug)]
enum Node {
    /// `lin < 0`
    Lt(Lin),
    /// `lin = 0`
    Eq(Lin),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Forall { var: VarId, range: Option<(Lin, Lin)>, body: Box<Node> },
    Block(usize),
}

impl Node {
    fn vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Node::Lt(l) | Node::Eq(l) => l.vars(out),
            Node::Not(a) => a.vars(out),
            Node::And(xs) | Node::Or(xs) => xs.iter().for_each(|x| x.vars(out)),
            Node::Forall { range, body, .. } => {
                if let Some((lo, hi)) = range {
                    lo.vars(out);
                    hi.vars(out);
                }
                body.vars(out);
            }
            // Filled in by the compiler, which knows the block contents.
            Node::Block(_) => {}
        }
    }

    fn is_atomic(&self) -> bool {
        match self {
            Node::Lt(_) | Node::Eq(_) => true,
            Node::Not(a) => a.is_atomic(),
            _ => false,
        }
    }

    /// Equation atoms among the top-level conjuncts.
    fn equations<'n>(&'n self, out: &mut Vec<&'n Lin>) {
        match self {
            Node::Eq(l) => out.push(l),
            Node::And(xs) => xs.iter().for_each(|x| x.equations(out)),
            _ => {}
        }
    }
}

#[derive(Debug)]
struct Conj {
    node: Node,
    /// Block variables mentioned, including inside nested binders.
    block_vars: Vec<VarId>,
    /// Every variable mentioned from outside the conjunct.
    all_vars: Vec<VarId>,
}

#[derive(Debug)]
struct Block {
    vars: Vec<VarId>,
    /// Variables without an explicit range (searched over `[-B, B]`).
    open: Vec<bool>,
    conjs: Vec<Conj>,
    /// Free variables of the whole block, for nested-block bookkeeping.
    free: BTreeSet<VarId>,
}

struct Compiler<'o> {
    opts: &'o EvalOptions,
    names: Vec<String>,
    blocks: Vec<Block>,
}

fn ge(a: Lin, b: &Lin) -> Node {
    // a >= b  <=>  !(a - b < 0)
    let mut d = a;
    d.add_scaled(b, &BigInt::from(-1));
    Node::Not(Box::new(Node::Lt(d)))
}

impl Compiler<'_> {
    fn new_var(&mut self, name: &str) -> VarId {
        self.names.push(name.to_string());
        self.names.len() - 1
    }

    fn lin(&self, t: &Term, scope: &[(String, VarId)]) -> Lin {
        let mut out = Lin::default();
        self.lin_into(t, scope, &BigInt::from(1), &mut out);
        out
    }

    fn lin_into(&self, t: &Term, scope: &[(String, VarId)], k: &BigInt, out: &mut Lin) {
        match t {
            Term::Var(v) => {
                let id = scope.iter().rev().find(|(n, _)| n == v).map(|(_, id)| *id).expect("scope checked");
                out.push(k.clone(), Summand::Var(id));
            }
            Term::Lit(c) => out.konst += k * c,
            Term::Add(a, b) => {
                self.lin_into(a, scope, k, out);
                self.lin_into(b, scope, k, out);
            }
            Term::Sub(a, b) => {
                self.lin_into(a, scope, k, out);
                self.lin_into(b, scope, &-k, out);
            }
            Term::Scale(c, a) => self.lin_into(a, scope, &(k * c), out),
            Term::App(a) => {
                let inner = self.lin(a, scope);
                out.push(k.clone(), Summand::App(Box::new(inner)));
            }
        }
    }

    fn diff(&self, a: &Term, b: &Term, scope: &[(String, VarId)]) -> Lin {
        let mut l = self.lin(a, scope);
        l.add_scaled(&self.lin(b, scope), &BigInt::from(-1));
        l
    }

    fn node(&mut self, f: &Formula, scope: &mut Vec<(String, VarId)>) -> Node {
        match f {
            Formula::Lt(a, b) => Node::Lt(self.diff(a, b, scope)),
            Formula::Eq(a, b) => Node::Eq(self.diff(a, b, scope)),
            Formula::Not(a) => Node::Not(Box::new(self.node(a, scope))),
            Formula::And(..) => {
                let mut xs = Vec::new();
                self.flatten_and(f, scope, &mut xs);
                Node::And(xs)
            }
            Formula::Or(a, b) => {
                let mut xs = Vec::new();
                for g in [a, b] {
                    match self.node(g, scope) {
                        Node::Or(ys) => xs.extend(ys),
                        n => xs.push(n),
                    }
                }
                Node::Or(xs)
            }
            Formula::Implies(a, b) => {
                let na = Node::Not(Box::new(self.node(a, scope)));
                Node::Or(vec![na, self.node(b, scope)])
            }
            Formula::Forall { var, range, body } => {
                let range = range.as_ref().map(|(lo, hi)| (self.lin(lo, scope), self.lin(hi, scope)));
                let id = self.new_var(var);
                scope.push((var.clone(), id));
                let body = Box::new(self.node(body, scope));
                scope.pop();
                Node::Forall { var: id, range, body }
            }
            Formula::Exists { .. } => {
                let mut vars = Vec::new();
                let mut open = Vec::new();
                let mut conjs = Vec::new();
                self.gather(f, scope, &mut vars, &mut open, &mut conjs);
                self.finish_block(vars, open, conjs)
            }
        }
    }

    fn flatten_and(&mut self, f: &Formula, scope: &mut Vec<(String, VarId)>, out: &mut Vec<Node>) {
        match f {
            Formula::And(a, b) => {
                self.flatten_and(a, scope, out);
                self.flatten_and(b, scope, out);
            }
            g => out.push(self.node(g, scope)),
        }
    }

    fn gather(
        &mut self,
        f: &Formula,
        scope: &mut Vec<(String, VarId)>,
        vars: &mut Vec<VarId>,
        open: &mut Vec<bool>,
        conjs: &mut Vec<Node>,
    ) {
        match f {
            Formula::And(a, b) => {
                self.gather(a, scope, vars, open, conjs);
                self.gather(b, scope, vars, open, conjs);
            }
            Formula::Exists { var, range, body } => {
                let bounds = match range {
                    Some((lo, hi)) => Some((self.lin(lo, scope), self.lin(hi, scope))),
                    None if self.opts.closed_world => {
                        let b = BigInt::from(self.opts.bound);
                        Some((Lin { konst: -&b, terms: vec![] }, Lin { konst: b, terms: vec![] }))
                    }
                    None => None,
                };
                let id = self.new_var(var);
                vars.push(id);
                open.push(range.is_none() && !self.opts.closed_world);
                if let Some((lo, hi)) = bounds {
                    let mut x = Lin::default();
                    x.push(BigInt::from(1), Summand::Var(id));
                    conjs.push(ge(x.clone(), &lo));
                    conjs.push(ge(hi, &x));
                }
                scope.push((var.clone(), id));
                self.gather(body, scope, vars, open, conjs);
                scope.pop();
            }
            g => conjs.push(self.node(g, scope)),
        }
    }

    fn free_of(&self, n: &Node) -> BTreeSet<VarId> {
        let mut s = BTreeSet::new();
        self.collect(n, &mut s);
        s
    }

    fn collect(&self, n: &Node, out: &mut BTreeSet<VarId>) {
        match n {
            Node::Block(b) => out.extend(self.blocks[*b].free.iter().copied()),
            Node::Not(a) => self.collect(a, out),
            Node::And(xs) | Node::Or(xs) => xs.iter().for_each(|x| self.collect(x, out)),
            Node::Forall { var, range, body } => {
                if let Some((lo, hi)) = range {
                    lo.vars(out);
                    hi.vars(out);
                }
                let mut inner = BTreeSet::new();
                self.collect(body, &mut inner);
                inner.remove(var);
                out.extend(inner);
            }
            leaf => leaf.vars(out),
        }
    }

    fn finish_block(&mut self, vars: Vec<VarId>, open: Vec<bool>, nodes: Vec<Node>) -> Node {
        let mut free = BTreeSet::new();
        let conjs: Vec<Conj> = nodes
            .into_iter()
            .map(|node| {
                let all = self.free_of(&node);
                free.extend(all.iter().copied());
                Conj {
                    block_vars: vars.iter().copied().filter(|v| all.contains(v)).collect(),
                    all_vars: all.into_iter().collect(),
                    node,
                }
            })
            .collect();
        for v in &vars {
            free.remove(v);
        }
        self.blocks.push(Block { vars, open, conjs, free });
        Node::Block(self.blocks.len() - 1)
    }
}

#[derive(Clone, Debug)]
struct Outcome {
    value: TriState,
    witness: Vec<(VarId, BigInt)>,
    /// Conjunct whose direct evaluation made this branch false.
    blame: Option<usize>,
}

impl Outcome {
    fn of(value: TriState) -> Outcome {
        Outcome { value, witness: Vec::new(), blame: None }
    }
}

type MemoKey = (usize, Vec<bool>, Vec<(VarId, BigInt)>);
type IndexKey = (usize, VarId, i64, i64, Vec<(VarId, BigInt)>);
type Equation<'a> = (&'a Lin, Option<(VarId, BigInt)>);

/// `G(x)` values over an interval.
struct ValueIndex {
    by_value: HashMap<BigInt, Vec<i64>>,
    errors: Vec<i64>,
}

const INDEX_MIN_RANGE: i64 = 64;
const MEMO_LIMIT: usize = 2_000_000;

struct Evaluator<'a> {
    seq: &'a dyn IntSequence,
    opts: &'a EvalOptions,
    blocks: &'a [Block],
    vals: Vec<Option<BigInt>>,
    enumerated: u64,
    memo: HashMap<MemoKey, Outcome>,
    index: HashMap<IndexKey, Rc<ValueIndex>>,
}

/// `Err` carries the reason an atom is unknown; `Ok(None)` means a variable
/// is unassigned.
type LinVal = std::result::Result<Option<BigInt>, String>;

impl<'a> Evaluator<'a> {
    fn lin(&self, l: &Lin) -> LinVal {
        let mut acc = l.konst.clone();
        for (c, s) in &l.terms {
            let v = match s {
                Summand::Var(x) => match &self.vals[*x] {
                    Some(v) => v.clone(),
                    None => return Ok(None),
                },
                Summand::App(a) => {
                    let Some(arg) = self.lin(a)? else { return Ok(None) };
                    let n = arg.to_i64().ok_or_else(|| format!("f argument {arg} out of range"))?;
                    self.seq.value(n).map_err(|e| e.to_string())?
                }
            };
            acc += c * v;
        }
        Ok(Some(acc))
    }

    fn tick(&mut self) -> bool {
        self.enumerated += 1;
        self.enumerated <= self.opts.candidate_cap
    }

    fn cap_reason(&self) -> TriState {
        TriState::unknown(format!("candidate cap of {} reached", self.opts.candidate_cap))
    }

    fn node(&mut self, n: &Node) -> TriState {
        match n {
            Node::Lt(l) => match self.lin(l) {
                Ok(Some(v)) => TriState::from_bool(v.is_negative()),
                Ok(None) => TriState::unknown("unassigned variable"),
                Err(e) => TriState::Unknown(e),
            },
            Node::Eq(l) => match self.lin(l) {
                Ok(Some(v)) => TriState::from_bool(v.is_zero()),
                Ok(None) => TriState::unknown("unassigned variable"),
                Err(e) => TriState::Unknown(e),
            },
            Node::Not(a) => self.node(a).not(),
            Node::And(xs) => {
                let mut acc = TriState::True;
                for x in xs {
                    acc = acc.and(self.node(x));
                    if acc.is_false() {
                        break;
                    }
                }
                acc
            }
            Node::Or(xs) => {
                let mut acc = TriState::False;
                for x in xs {
                    acc = acc.or(self.node(x));
                    if acc.is_true() {
                        break;
                    }
                }
                acc
            }
            Node::Forall { var, range, body } => self.forall(*var, range.as_ref(), body),
            Node::Block(b) => self.block(*b).value,
        }
    }

    fn bounds(&self, range: Option<&(Lin, Lin)>) -> std::result::Result<(i64, i64, bool), TriState> {
        match range {
            None => Ok((-self.opts.bound, self.opts.bound, !self.opts.closed_world)),
            Some((lo, hi)) => {
                let get = |l: &Lin| match self.lin(l) {
                    Ok(Some(v)) => v.to_i64().ok_or_else(|| TriState::unknown(format!("range endpoint {v} out of range"))),
                    Ok(None) => Err(TriState::unknown("unassigned variable in range")),
                    Err(e) => Err(TriState::Unknown(e)),
                };
                Ok((get(lo)?, get(hi)?, false))
            }
        }
    }

    fn forall(&mut self, var: VarId, range: Option<&(Lin, Lin)>, body: &Node) -> TriState {
        let (lo, hi, truncated) = match self.bounds(range) {
            Ok(b) => b,
            Err(t) => return t,
        };
        let mut acc = TriState::True;
        let mut k = lo;
        while k <= hi {
            if !self.tick() {
                acc = acc.and(self.cap_reason());
                break;
            }
            self.vals[var] = Some(BigInt::from(k));
            let v = self.node(body);
            if v.is_false() {
                acc = TriState::False;
                break;
            }
            acc = acc.and(v);
            k += 1;
        }
        self.vals[var] = None;
        if acc.is_true() && truncated {
            return TriState::unknown(format!("universal checked only on [{lo}, {hi}]"));
        }
        acc
    }

    fn block(&mut self, b: usize) -> Outcome {
        let blk = &self.blocks[b];
        let mut done = vec![false; blk.conjs.len()];
        let out = self.search(b, &mut done);
        for v in &blk.vars {
            self.vals[*v] = None;
        }
        out
    }

    fn assigned(&self, v: VarId) -> bool {
        self.vals[v].is_some()
    }

    fn search(&mut self, b: usize, done: &mut [bool]) -> Outcome {
        let blocks = self.blocks;
        let blk = &blocks[b];
        // Evaluate conjuncts that just became closed, atoms first.
        let mut ready: Vec<usize> = (0..blk.conjs.len())
            .filter(|&i| !done[i] && blk.conjs[i].block_vars.iter().all(|&v| self.assigned(v)))
            .collect();
        ready.sort_by_key(|&i| !blk.conjs[i].node.is_atomic());
        for &i in &ready {
            done[i] = true;
        }
        let mut acc = TriState::True;
        let mut failed = None;
        for &i in &ready {
            let v = self.node(&blk.conjs[i].node);
            if v.is_false() {
                failed = Some(i);
                break;
            }
            acc = acc.and(v);
        }
        let out = if let Some(i) = failed {
            Outcome { value: TriState::False, witness: Vec::new(), blame: Some(i) }
        } else if blk.vars.iter().all(|&v| self.assigned(v)) {
            let witness = blk.vars.iter().map(|&v| (v, self.vals[v].clone().unwrap())).collect();
            Outcome { value: acc, witness, blame: None }
        } else {
            let key = self.memo_key(b, done);
            let sub = match self.memo.get(&key) {
                Some(o) => o.clone(),
                None => {
                    let o = self.expand(b, done);
                    if self.memo.len() >= MEMO_LIMIT {
                        self.memo.clear();
                    }
                    self.memo.insert(key, o.clone());
                    o
                }
            };
            let witness = sub
                .witness
                .into_iter()
                .map(|(v, old)| (v, self.vals[v].clone().unwrap_or(old)))
                .collect();
            Outcome { value: acc.and(sub.value), witness, blame: None }
        };
        for &i in &ready {
            done[i] = false;
        }
        out
    }

    fn memo_key(&self, b: usize, done: &[bool]) -> MemoKey {
        let blk = &self.blocks[b];
        let mask: Vec<bool> = blk.vars.iter().map(|&v| self.assigned(v)).collect();
        let mut rel = BTreeSet::new();
        for (i, c) in blk.conjs.iter().enumerate() {
            if !done[i] {
                rel.extend(c.all_vars.iter().copied().filter(|&v| self.assigned(v)));
            }
        }
        let vals = rel.into_iter().map(|v| (v, self.vals[v].clone().unwrap())).collect();
        (b, mask, vals)
    }

    /// Unassigned variables of a linear form.
    fn unassigned_in(&self, l: &Lin) -> Vec<VarId> {
        let mut s = BTreeSet::new();
        l.vars(&mut s);
        s.into_iter().filter(|&v| !self.assigned(v)).collect()
    }

    /// Equations available for pinning or indexing, paired with a temporary
    /// assignment (a universal variable set to its lower bound).
    fn equations(&self, b: usize, done: &[bool]) -> Vec<Equation<'a>> {
        let blocks: &'a [Block] = self.blocks;
        let blk = &blocks[b];
        let mut out = Vec::new();
        for (i, c) in blk.conjs.iter().enumerate() {
            if done[i] {
                continue;
            }
            match &c.node {
                Node::Eq(l) => out.push((l, None)),
                Node::Forall { var, range: Some((lo, hi)), body } => {
                    if let (Ok(Some(lo)), Ok(Some(hi))) = (self.lin(lo), self.lin(hi)) {
                        if lo <= hi {
                            let mut eqs = Vec::new();
                            body.equations(&mut eqs);
                            out.extend(eqs.into_iter().map(|l| (l, Some((*var, lo.clone())))));
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    fn expand(&mut self, b: usize, done: &mut [bool]) -> Outcome {
        let eqs = self.equations(b, done);
        let blocks = self.blocks;
        let blk = &blocks[b];
        // Pin a variable forced by a linear equation.
        for &(l, ref tmp) in &eqs {
            if let Some((k, v)) = tmp {
                self.vals[*k] = Some(v.clone());
            }
            let un = self.unassigned_in(l);
            let pin = if un.len() == 1 && blk.vars.contains(&un[0]) {
                let x = un[0];
                match l.linear_coeff(x) {
                    Some(c) if !c.is_zero() => {
                        let (_, rest) = l.split(x);
                        match self.lin(&rest) {
                            Ok(Some(r)) => Some((x, c, r)),
                            _ => None,
                        }
                    }
                    _ => None,
                }
            } else {
                None
            };
            if let Some((k, _)) = tmp {
                self.vals[*k] = None;
            }
            if let Some((x, c, r)) = pin {
                let (q, rem) = (-r).div_rem(&c);
                if !rem.is_zero() {
                    return Outcome::of(TriState::False);
                }
                self.vals[x] = Some(q);
                let out = self.search(b, done);
                self.vals[x] = None;
                return Outcome { blame: None, ..out };
            }
        }
        self.branch(b, done, &eqs)
    }

    /// Interval for `x` implied by closed linear inequalities; `None` if an
    /// explicitly ranged variable cannot be bounded yet.
    fn interval(&self, b: usize, done: &[bool], x: VarId) -> (Option<BigInt>, Option<BigInt>) {
        let blk = &self.blocks[b];
        let (mut lo, mut hi): (Option<BigInt>, Option<BigInt>) = (None, None);
        for (i, c) in blk.conjs.iter().enumerate() {
            if done[i] {
                continue;
            }
            let (l, negated) = match &c.node {
                Node::Lt(l) => (l, false),
                Node::Not(a) => match &**a {
                    Node::Lt(l) => (l, true),
                    _ => continue,
                },
                _ => continue,
            };
            let un = self.unassigned_in(l);
            if un != [x] {
                continue;
            }
            let Some(cx) = l.linear_coeff(x) else { continue };
            if cx.is_zero() {
                continue;
            }
            let (_, rest) = l.split(x);
            let Ok(Some(r)) = self.lin(&rest) else { continue };
            // cx*x + r < 0, or >= 0 when negated.
            let (new_lo, new_hi) = match (negated, cx.is_positive()) {
                // x < -r/cx
                (false, true) => (None, Some(ceil_div(&-&r, &cx) - 1)),
                // x > -r/cx
                (false, false) => (Some(floor_div(&-&r, &cx) + 1), None),
                // x >= -r/cx
                (true, true) => (Some(ceil_div(&-&r, &cx)), None),
                // x <= -r/cx
                (true, false) => (None, Some(floor_div(&-&r, &cx))),
            };
            if let Some(v) = new_lo {
                lo = Some(lo.map_or(v.clone(), |l: BigInt| l.max(v)));
            }
            if let Some(v) = new_hi {
                hi = Some(hi.map_or(v.clone(), |h: BigInt| h.min(v)));
            }
        }
        (lo, hi)
    }

    fn in_app(&self, b: usize, done: &[bool], x: VarId) -> bool {
        fn walk(n: &Node, x: VarId) -> bool {
            match n {
                Node::Lt(l) | Node::Eq(l) => l.terms.iter().any(|(_, s)| matches!(s, Summand::App(a) if a.mentions(x))),
                Node::Not(a) => walk(a, x),
                Node::And(xs) | Node::Or(xs) => xs.iter().any(|y| walk(y, x)),
                Node::Forall { body, .. } => walk(body, x),
                Node::Block(_) => false,
            }
        }
        let blk = &self.blocks[b];
        blk.conjs.iter().enumerate().any(|(i, c)| !done[i] && walk(&c.node, x))
    }

    /// An equation in which `x` is the only unknown and occurs under `f`.
    fn index_equation(&mut self, eqs: &[Equation<'a>], x: VarId) -> Option<Equation<'a>> {
        for &(lr, ref tmp) in eqs {
            if let Some((k, v)) = tmp {
                self.vals[*k] = Some(v.clone());
            }
            let ok = self.unassigned_in(lr) == [x] && lr.linear_coeff(x).is_none();
            if let Some((k, _)) = tmp {
                self.vals[*k] = None;
            }
            if ok {
                return Some((lr, tmp.clone()));
            }
        }
        None
    }

    fn branch(&mut self, b: usize, done: &mut [bool], eqs: &[Equation<'a>]) -> Outcome {
        let blocks = self.blocks;
        let blk = &blocks[b];
        let bound = BigInt::from(self.opts.bound);
        // Pick the variable to enumerate.
        let mut best: Option<((bool, bool, bool, bool), usize, VarId)> = None;
        let unassigned: Vec<(usize, VarId)> =
            blk.vars.iter().copied().enumerate().filter(|&(_, v)| !self.assigned(v)).collect();
        for &(pos, x) in &unassigned {
            let (lo, hi) = self.interval(b, done, x);
            if !blk.open[pos] && (lo.is_none() || hi.is_none()) {
                continue;
            }
            let rank = (
                lo.is_some() && self.antitone(b, done, x),
                self.index_equation(eqs, x).is_some(),
                self.in_app(b, done, x),
                lo.is_some() || hi.is_some(),
            );
            if best.as_ref().map_or(true, |(r, _, _)| rank > *r) {
                best = Some((rank, pos, x));
            }
        }
        let Some((_, pos, x)) = best else {
            return Outcome::of(TriState::unknown("no enumerable variable"));
        };
        let (lo, hi) = self.interval(b, done, x);
        let open = blk.open[pos];
        let truncated = open && (lo.as_ref().map_or(true, |l| *l < -&bound) || hi.as_ref().map_or(true, |h| *h > bound));
        let lo = if open { lo.map_or(-&bound, |l| l.max(-&bound)) } else { lo.unwrap() };
        let hi = if open { hi.map_or(bound.clone(), |h| h.min(bound.clone())) } else { hi.unwrap() };
        if lo > hi {
            return Outcome::of(if truncated {
                TriState::unknown(format!("search range of {} is empty within the bound", x))
            } else {
                TriState::False
            });
        }
        let (Some(lo), Some(hi)) = (lo.to_i64(), hi.to_i64()) else {
            return Outcome::of(TriState::unknown("search range exceeds 64-bit integers"));
        };

        // Only the smallest value can succeed when larger ones are harder.
        let antitone = self.antitone(b, done, x);
        let cands: Box<dyn Iterator<Item = i64>> = match self.index_equation(eqs, x) {
            _ if antitone => Box::new(std::iter::once(lo)),
            Some((l, tmp)) if hi.saturating_sub(lo) >= INDEX_MIN_RANGE => match self.indexed(l, tmp, x, lo, hi) {
                Ok(list) => Box::new(list.into_iter()),
                Err(t) => return Outcome::of(t),
            },
            _ => Box::new(lo..=hi),
        };

        let prunable = self.prunable(b, x);
        let mut unknown: Option<TriState> = None;
        let mut pruned = false;
        for v in cands {
            if !self.tick() {
                return Outcome::of(self.cap_reason());
            }
            self.vals[x] = Some(BigInt::from(v));
            let child = self.search(b, done);
            self.vals[x] = None;
            match &child.value {
                TriState::True => return Outcome { blame: None, ..child },
                TriState::Unknown(_) => {
                    if unknown.is_none() {
                        unknown = Some(child.value.clone());
                    }
                }
                TriState::False => {
                    if child.blame.is_some_and(|i| prunable.contains(&i)) {
                        pruned = true;
                        break;
                    }
                }
            }
        }
        let value = match unknown {
            Some(u) => u,
            None if truncated && !pruned && !(antitone && lo > -self.opts.bound) => TriState::unknown(format!("search bound {} exhausted", self.opts.bound)),
            None => TriState::False,
        };
        Outcome::of(value)
    }

    /// Whether every open conjunct mentioning `x` can only get harder as
    /// `x` grows: closed linear bounds on `x` alone, and universals whose
    /// range grows with `x`.
    fn antitone(&self, b: usize, done: &[bool], x: VarId) -> bool {
        let blk = &self.blocks[b];
        let grows = self.prunable(b, x);
        blk.conjs.iter().enumerate().all(|(i, c)| {
            if done[i] || !c.block_vars.contains(&x) || grows.contains(&i) {
                return true;
            }
            let l = match &c.node {
                Node::Lt(l) => l,
                Node::Not(a) => match &**a {
                    Node::Lt(l) => l,
                    _ => return false,
                },
                _ => return false,
            };
            self.unassigned_in(l) == [x] && l.linear_coeff(x).is_some()
        })
    }

    /// Universal conjuncts that only get harder as `x` grows.
    fn prunable(&self, b: usize, x: VarId) -> Vec<usize> {
        let blk = &self.blocks[b];
        blk.conjs
            .iter()
            .enumerate()
            .filter(|(_, c)| match &c.node {
                Node::Forall { range: Some((lo, hi)), body, .. } => {
                    let mut bv = BTreeSet::new();
                    body.vars(&mut bv);
                    !lo.mentions(x)
                        && !bv.contains(&x)
                        && !contains_block(body)
                        && hi.linear_coeff(x).is_some_and(|c| c.is_positive())
                }
                _ => false,
            })
            .map(|(i, _)| i)
            .collect()
    }

    fn indexed(
        &mut self,
        lr: &'a Lin,
        tmp: Option<(VarId, BigInt)>,
        x: VarId,
        lo: i64,
        hi: i64,
    ) -> std::result::Result<Vec<i64>, TriState> {
        if let Some((k, v)) = &tmp {
            self.vals[*k] = Some(v.clone());
        }
        let (g, rest) = lr.split(x);
        let target = self.lin(&rest);
        let mut gv = BTreeSet::new();
        g.vars(&mut gv);
        let ctx: Vec<(VarId, BigInt)> =
            gv.into_iter().filter(|&v| v != x).map(|v| (v, self.vals[v].clone().unwrap())).collect();
        if let Some((k, _)) = &tmp {
            self.vals[*k] = None;
        }
        let target = match target {
            Ok(Some(t)) => -t,
            Ok(None) => unreachable!("only x is unassigned"),
            // The residual is unknown for every x, so nothing can be ruled out.
            Err(_) => return Ok((lo..=hi).collect()),
        };
        let key: IndexKey = (lr as *const Lin as usize, x, lo, hi, ctx.clone());
        let idx = match self.index.get(&key) {
            Some(i) => i.clone(),
            None => {
                let mut by_value: HashMap<BigInt, Vec<i64>> = HashMap::new();
                let mut errors = Vec::new();
                if let Some((k, v)) = &tmp {
                    self.vals[*k] = Some(v.clone());
                }
                for v in lo..=hi {
                    if !self.tick() {
                        if let Some((k, _)) = &tmp {
                            self.vals[*k] = None;
                        }
                        self.vals[x] = None;
                        return Err(self.cap_reason());
                    }
                    self.vals[x] = Some(BigInt::from(v));
                    match self.lin(&g) {
                        Ok(Some(y)) => by_value.entry(y).or_default().push(v),
                        _ => errors.push(v),
                    }
                }
                self.vals[x] = None;
                if let Some((k, _)) = &tmp {
                    self.vals[*k] = None;
                }
                let i = Rc::new(ValueIndex { by_value, errors });
                self.index.insert(key, i.clone());
                i
            }
        };
        let mut out: Vec<i64> = idx.by_value.get(&target).cloned().unwrap_or_default();
        out.extend(idx.errors.iter().copied());
        out.sort_unstable();
        Ok(out)
    }
}

fn contains_block(n: &Node) -> bool {
    match n {
        Node::Block(_) => true,
        Node::Not(a) => contains_block(a),
        Node::And(xs) | Node::Or(xs) => xs.iter().any(contains_block),
        Node::Forall { body, .. } => contains_block(body),
        _ => false,
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}
