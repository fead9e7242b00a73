//! Stable models of finite propositional formulas.
//!
//! Candidates are the classical models of the formula, enumerated by a
//! chronological backtracking search that propagates truth values directly
//! over the formula DAG (no clausal form). Each candidate `X` is then checked
//! against the definition: no `J` with `J <^p X` may satisfy the reduct
//! `F^X`. The reduct is realized on the same DAG by freezing every node that
//! `X` falsifies to `⊥`, and the search for a smaller model uses the same
//! propagator.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;

use crate::error::{EngineError, Error, FormulaError};
use crate::formula::{Formula, Interpretation};

/// Default cap on the number of candidate interpretations examined.
pub const DEFAULT_CANDIDATE_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub candidate_budget: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            candidate_budget: DEFAULT_CANDIDATE_BUDGET,
        }
    }
}

/// A formula together with its signature and the intensional atoms **p**.
#[derive(Clone)]
pub struct StableQuery<'f, A: Ord> {
    pub formula: &'f Formula<A>,
    pub universe: BTreeSet<A>,
    /// `None` means every atom of the universe is intensional.
    pub intensional: Option<BTreeSet<A>>,
}

impl<'f, A: Ord + Clone> StableQuery<'f, A> {
    pub fn new(formula: &'f Formula<A>, universe: impl IntoIterator<Item = A>) -> Self {
        StableQuery {
            formula,
            universe: universe.into_iter().collect(),
            intensional: None,
        }
    }

    /// Uses the formula's own atoms as the signature.
    pub fn over_own_atoms(formula: &'f Formula<A>) -> Self {
        StableQuery {
            formula,
            universe: formula.atoms(),
            intensional: None,
        }
    }

    /// Restricts minimization to `p` (the relative notion `SM[F; p]`).
    pub fn relative_to(mut self, p: impl IntoIterator<Item = A>) -> Self {
        self.intensional = Some(p.into_iter().collect());
        self
    }

    fn is_intensional(&self, a: &A) -> bool {
        self.intensional.as_ref().map_or(true, |p| p.contains(a))
    }
}

pub trait EngineAtom: Ord + Clone + Hash + fmt::Display {}
impl<T: Ord + Clone + Hash + fmt::Display> EngineAtom for T {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    False,
    Atom,
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
}

/// The formula as a hash-consed DAG.
struct Circuit {
    nodes: Vec<Node>,
    parents: Vec<Vec<u32>>,
    /// Node id of each atom, indexed like the candidate atom list.
    atom_nodes: Vec<u32>,
    root: u32,
}

struct CircuitBuilder<'a, A> {
    nodes: Vec<Node>,
    index: HashMap<Node, u32>,
    atom_index: &'a HashMap<A, u32>,
    atom_nodes: Vec<u32>,
    by_ptr: HashMap<*const Formula<A>, u32>,
}

impl<'a, A: EngineAtom> CircuitBuilder<'a, A> {
    fn new(atom_index: &'a HashMap<A, u32>, atom_count: usize) -> Self {
        let mut nodes = Vec::with_capacity(atom_count + 1);
        let mut atom_nodes = Vec::with_capacity(atom_count);
        for _ in 0..atom_count {
            atom_nodes.push(nodes.len() as u32);
            nodes.push(Node::Atom);
        }
        let mut index = HashMap::new();
        index.insert(Node::False, nodes.len() as u32);
        nodes.push(Node::False);
        CircuitBuilder {
            nodes,
            index,
            atom_index,
            atom_nodes,
            by_ptr: HashMap::new(),
        }
    }

    fn intern(&mut self, node: Node) -> u32 {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.index.insert(node, id);
        id
    }

    fn add(&mut self, f: &Formula<A>) -> Result<u32, FormulaError> {
        let key = f as *const Formula<A>;
        if let Some(&id) = self.by_ptr.get(&key) {
            return Ok(id);
        }
        let id = match f {
            Formula::False => self.intern(Node::False),
            Formula::Atom(a) => match self.atom_index.get(a) {
                Some(&i) => self.atom_nodes[i as usize],
                None => return Err(FormulaError::AtomOutsideSignature(a.to_string())),
            },
            Formula::And(l, r) => {
                let (l, r) = (self.add(l)?, self.add(r)?);
                self.intern(Node::And(l, r))
            }
            Formula::Or(l, r) => {
                let (l, r) = (self.add(l)?, self.add(r)?);
                self.intern(Node::Or(l, r))
            }
            Formula::Implies(l, r) => {
                let (l, r) = (self.add(l)?, self.add(r)?);
                self.intern(Node::Imp(l, r))
            }
        };
        self.by_ptr.insert(key, id);
        Ok(id)
    }

    fn finish(self, root: u32) -> Circuit {
        let mut parents = vec![Vec::new(); self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Node::And(a, b) | Node::Or(a, b) | Node::Imp(a, b) = *node {
                parents[a as usize].push(id as u32);
                if b != a {
                    parents[b as usize].push(id as u32);
                }
            }
        }
        Circuit {
            nodes: self.nodes,
            parents,
            atom_nodes: self.atom_nodes,
            root,
        }
    }
}

const UNKNOWN: u8 = 0;
const FALSE: u8 = 1;
const TRUE: u8 = 2;

struct Conflict;

/// Three-valued assignment over circuit nodes with propagation in both
/// directions. Frozen nodes are constants: their own connective is ignored.
struct Propagator<'c> {
    circuit: &'c Circuit,
    frozen: &'c [bool],
    val: Vec<u8>,
    trail: Vec<u32>,
    qhead: usize,
}

impl<'c> Propagator<'c> {
    fn new(circuit: &'c Circuit, frozen: &'c [bool]) -> Self {
        Propagator {
            circuit,
            frozen,
            val: vec![UNKNOWN; circuit.nodes.len()],
            trail: Vec::with_capacity(circuit.nodes.len()),
            qhead: 0,
        }
    }

    fn set(&mut self, n: u32, v: u8) -> Result<(), Conflict> {
        match self.val[n as usize] {
            UNKNOWN => {
                self.val[n as usize] = v;
                self.trail.push(n);
                Ok(())
            }
            cur if cur == v => Ok(()),
            _ => Err(Conflict),
        }
    }

    fn check(&mut self, n: u32) -> Result<(), Conflict> {
        if self.frozen[n as usize] {
            return Ok(());
        }
        let vn = self.val[n as usize];
        match self.circuit.nodes[n as usize] {
            Node::False => self.set(n, FALSE),
            Node::Atom => Ok(()),
            Node::And(a, b) => {
                let (va, vb) = (self.val[a as usize], self.val[b as usize]);
                if va == FALSE || vb == FALSE {
                    self.set(n, FALSE)?;
                }
                if va == TRUE && vb == TRUE {
                    self.set(n, TRUE)?;
                }
                match vn {
                    TRUE => {
                        self.set(a, TRUE)?;
                        self.set(b, TRUE)
                    }
                    FALSE if va == TRUE => self.set(b, FALSE),
                    FALSE if vb == TRUE => self.set(a, FALSE),
                    _ => Ok(()),
                }
            }
            Node::Or(a, b) => {
                let (va, vb) = (self.val[a as usize], self.val[b as usize]);
                if va == TRUE || vb == TRUE {
                    self.set(n, TRUE)?;
                }
                if va == FALSE && vb == FALSE {
                    self.set(n, FALSE)?;
                }
                match vn {
                    FALSE => {
                        self.set(a, FALSE)?;
                        self.set(b, FALSE)
                    }
                    TRUE if va == FALSE => self.set(b, TRUE),
                    TRUE if vb == FALSE => self.set(a, TRUE),
                    _ => Ok(()),
                }
            }
            Node::Imp(a, b) => {
                let (va, vb) = (self.val[a as usize], self.val[b as usize]);
                if va == FALSE || vb == TRUE {
                    self.set(n, TRUE)?;
                }
                if va == TRUE && vb == FALSE {
                    self.set(n, FALSE)?;
                }
                match vn {
                    FALSE => {
                        self.set(a, TRUE)?;
                        self.set(b, FALSE)
                    }
                    TRUE if va == TRUE => self.set(b, TRUE),
                    TRUE if vb == FALSE => self.set(a, FALSE),
                    _ => Ok(()),
                }
            }
        }
    }

    fn propagate(&mut self) -> Result<(), Conflict> {
        while self.qhead < self.trail.len() {
            let n = self.trail[self.qhead];
            self.qhead += 1;
            self.check(n)?;
            let circuit = self.circuit;
            for &p in &circuit.parents[n as usize] {
                self.check(p)?;
            }
        }
        Ok(())
    }

    fn assume(&mut self, n: u32, v: u8) -> Result<(), Conflict> {
        self.set(n, v)?;
        self.propagate()
    }

    fn undo_to(&mut self, len: usize) {
        for &n in &self.trail[len..] {
            self.val[n as usize] = UNKNOWN;
        }
        self.trail.truncate(len);
        self.qhead = len;
    }
}

/// Candidate atoms, the compiled circuit, and which atoms are intensional.
struct Prepared<A> {
    atoms: Vec<A>,
    circuit: Circuit,
    intensional: Vec<bool>,
}

fn prepare<A: EngineAtom>(q: &StableQuery<'_, A>, candidates: BTreeSet<A>) -> Result<Prepared<A>, Error> {
    for a in &candidates {
        if !q.universe.contains(a) {
            return Err(FormulaError::AtomOutsideSignature(a.to_string()).into());
        }
    }
    let atoms: Vec<A> = candidates.into_iter().collect();
    let atom_index: HashMap<A, u32> = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i as u32))
        .collect();
    let mut builder = CircuitBuilder::new(&atom_index, atoms.len());
    let root = builder.add(q.formula)?;
    let circuit = builder.finish(root);
    let intensional = atoms.iter().map(|a| q.is_intensional(a)).collect();
    Ok(Prepared {
        atoms,
        circuit,
        intensional,
    })
}

/// Is there a `J <^p X` satisfying `F^X`? `xval` holds the value of every
/// node under `X`, which must be a model.
fn has_smaller_model(circuit: &Circuit, xval: &[u8], intensional: &[bool]) -> bool {
    let frozen: Vec<bool> = xval.iter().map(|&v| v != TRUE).collect();
    let mut prop = Propagator::new(circuit, &frozen);
    let mut free = Vec::new();
    for (i, &node) in circuit.atom_nodes.iter().enumerate() {
        if xval[node as usize] == TRUE && intensional[i] {
            free.push(node);
        }
    }
    if free.is_empty() {
        return false;
    }
    let mut seeded = Vec::new();
    for (n, &is_frozen) in frozen.iter().enumerate() {
        if is_frozen {
            seeded.push((n as u32, FALSE));
        }
    }
    for (i, &node) in circuit.atom_nodes.iter().enumerate() {
        if xval[node as usize] == TRUE && !intensional[i] {
            seeded.push((node, TRUE));
        }
    }
    seeded.push((circuit.root, TRUE));
    for (n, v) in seeded {
        if prop.set(n, v).is_err() {
            return false;
        }
    }
    if prop.propagate().is_err() {
        return false;
    }
    search_smaller(&mut prop, &free)
}

fn search_smaller(prop: &mut Propagator<'_>, free: &[u32]) -> bool {
    let next = free.iter().copied().find(|&n| prop.val[n as usize] == UNKNOWN);
    let Some(n) = next else {
        return free.iter().any(|&n| prop.val[n as usize] == FALSE);
    };
    for v in [FALSE, TRUE] {
        if v == TRUE
            && free
                .iter()
                .all(|&m| m == n || prop.val[m as usize] == TRUE)
        {
            // every other free atom is already true: J would equal X
            continue;
        }
        let mark = prop.trail.len();
        let found = prop.assume(n, v).is_ok() && search_smaller(prop, free);
        prop.undo_to(mark);
        if found {
            return true;
        }
    }
    false
}

/// Runs the stable-model search, calling `emit` for each stable model in
/// search order.
fn search<A: EngineAtom>(
    prepared: &Prepared<A>,
    config: &EngineConfig,
    emit: &mut dyn FnMut(&[u8]),
) -> Result<(), EngineError> {
    let circuit = &prepared.circuit;
    let frozen = vec![false; circuit.nodes.len()];
    let mut prop = Propagator::new(circuit, &frozen);
    let false_node = circuit
        .nodes
        .iter()
        .position(|n| *n == Node::False)
        .expect("circuit always holds a falsity node") as u32;
    if prop.set(false_node, FALSE).is_err()
        || prop.set(circuit.root, TRUE).is_err()
        || prop.propagate().is_err()
    {
        return Ok(());
    }
    let mut seen = 0u64;
    enumerate(&mut prop, prepared, 0, config, &mut seen, emit)
}

fn enumerate<A>(
    prop: &mut Propagator<'_>,
    prepared: &Prepared<A>,
    cursor: usize,
    config: &EngineConfig,
    seen: &mut u64,
    emit: &mut dyn FnMut(&[u8]),
) -> Result<(), EngineError> {
    let atom_nodes = &prepared.circuit.atom_nodes;
    let mut cursor = cursor;
    while cursor < atom_nodes.len() && prop.val[atom_nodes[cursor] as usize] != UNKNOWN {
        cursor += 1;
    }
    if cursor == atom_nodes.len() {
        *seen += 1;
        if *seen > config.candidate_budget {
            return Err(EngineError::BudgetExceeded {
                limit: config.candidate_budget,
            });
        }
        if !has_smaller_model(&prepared.circuit, &prop.val, &prepared.intensional) {
            emit(&prop.val);
        }
        return Ok(());
    }
    let node = atom_nodes[cursor];
    for v in [FALSE, TRUE] {
        let mark = prop.trail.len();
        if prop.assume(node, v).is_ok() {
            let res = enumerate(prop, prepared, cursor + 1, config, seen, emit);
            if res.is_err() {
                prop.undo_to(mark);
                return res;
            }
        }
        prop.undo_to(mark);
    }
    Ok(())
}

/// Enumerates stable models under a configurable candidate budget.
#[derive(Debug, Clone, Default)]
pub struct StableEngine {
    pub config: EngineConfig,
}

impl StableEngine {
    pub fn new(config: EngineConfig) -> Self {
        StableEngine { config }
    }

    /// All stable models, sorted lexicographically over their sorted atoms.
    ///
    /// Signature atoms that do not occur in the formula are false in every
    /// stable model when intensional, and range freely otherwise.
    pub fn stable_models<A: EngineAtom>(
        &self,
        q: &StableQuery<'_, A>,
    ) -> Result<Vec<Interpretation<A>>, Error> {
        let mut candidates = q.formula.atoms();
        for a in &q.universe {
            if !q.is_intensional(a) {
                candidates.insert(a.clone());
            }
        }
        let prepared = prepare(q, candidates)?;
        let mut models = Vec::new();
        search(&prepared, &self.config, &mut |val| {
            let model: Interpretation<A> = prepared
                .circuit
                .atom_nodes
                .iter()
                .zip(&prepared.atoms)
                .filter(|(n, _)| val[**n as usize] == TRUE)
                .map(|(_, a)| a.clone())
                .collect();
            models.push(model);
        })?;
        models.sort();
        models.dedup();
        Ok(models)
    }

    /// `x ⊨ SM[F; p]`: `x` is a model of `F` and no `J <^p x` satisfies `F^x`.
    pub fn is_stable_model<A: EngineAtom>(
        &self,
        x: &Interpretation<A>,
        q: &StableQuery<'_, A>,
    ) -> bool {
        // An intensional atom that is true but absent from F can always be dropped.
        let formula_atoms = q.formula.atoms();
        if x
            .atoms()
            .iter()
            .any(|a| !formula_atoms.contains(a) && q.is_intensional(a))
        {
            return false;
        }
        let Ok(prepared) = prepare(q, formula_atoms) else {
            return false;
        };
        let circuit = &prepared.circuit;
        let frozen = vec![false; circuit.nodes.len()];
        let mut prop = Propagator::new(circuit, &frozen);
        for (node, a) in circuit.atom_nodes.iter().zip(&prepared.atoms) {
            let v = if x.contains(a) { TRUE } else { FALSE };
            let _ = prop.set(*node, v);
        }
        for (id, node) in circuit.nodes.iter().enumerate() {
            if *node == Node::False {
                let _ = prop.set(id as u32, FALSE);
            }
        }
        if prop.propagate().is_err() || prop.val[circuit.root as usize] != TRUE {
            return false;
        }
        !has_smaller_model(circuit, &prop.val, &prepared.intensional)
    }
}

/// [`StableEngine::stable_models`] with the default configuration.
pub fn stable_models<A: EngineAtom>(
    q: &StableQuery<'_, A>,
) -> Result<Vec<Interpretation<A>>, Error> {
    StableEngine::default().stable_models(q)
}

/// [`StableEngine::is_stable_model`] with the default configuration.
pub fn is_stable_model<A: EngineAtom>(x: &Interpretation<A>, q: &StableQuery<'_, A>) -> bool {
    StableEngine::default().is_stable_model(x, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::uec;
    use crate::signature::{Atom, ConstantKind, Signature};
    use crate::symbol::Symbol;

    fn sig() -> Signature {
        Signature::new()
            .with("c", ConstantKind::RegularFluent, [1, 2, 3].map(Symbol::int))
            .unwrap()
    }

    fn c(v: i64) -> Atom {
        Atom::new("c", Symbol::int(v))
    }

    fn f1() -> Formula<Atom> {
        Formula::and(Formula::choice(Formula::Atom(c(1))), uec(&sig()))
    }

    fn f2() -> Formula<Atom> {
        Formula::and(f1(), Formula::Atom(c(2)))
    }

    fn only(v: i64) -> Interpretation<Atom> {
        Interpretation::new([c(v)])
    }

    #[test]
    fn example_one_stability() {
        let f1 = f1();
        let q1 = StableQuery::new(&f1, sig().atoms());
        assert!(is_stable_model(&only(1), &q1));
        assert!(!is_stable_model(&only(2), &q1));
        assert_eq!(stable_models(&q1).unwrap(), vec![only(1)]);

        let f2 = f2();
        let q2 = StableQuery::new(&f2, sig().atoms());
        assert!(is_stable_model(&only(2), &q2));
        assert!(!is_stable_model(&only(1), &q2));
        assert_eq!(stable_models(&q2).unwrap(), vec![only(2)]);
    }

    #[test]
    fn nonmonotonic_under_added_conjunct() {
        let (f1, f2) = (f1(), f2());
        assert_ne!(
            stable_models(&StableQuery::new(&f1, sig().atoms())).unwrap(),
            stable_models(&StableQuery::new(&f2, sig().atoms())).unwrap()
        );
    }

    #[test]
    fn top_has_empty_stable_model() {
        let top: Formula<&str> = Formula::top();
        let q = StableQuery::new(&top, ["p"]);
        assert_eq!(stable_models(&q).unwrap(), vec![Interpretation::empty()]);
    }

    #[test]
    fn choice_has_two_stable_models() {
        let f = Formula::choice(Formula::Atom("p"));
        let q = StableQuery::new(&f, ["p"]);
        assert_eq!(
            stable_models(&q).unwrap(),
            vec![Interpretation::empty(), Interpretation::new(["p"])]
        );
    }

    #[test]
    fn disjunction_yields_minimal_models_only() {
        let f = Formula::or(Formula::Atom("p"), Formula::Atom("q"));
        let q = StableQuery::over_own_atoms(&f);
        assert_eq!(
            stable_models(&q).unwrap(),
            vec![Interpretation::new(["p"]), Interpretation::new(["q"])]
        );
    }

    #[test]
    fn empty_intensional_set_gives_classical_models() {
        let f = Formula::or(Formula::Atom("p"), Formula::Atom("q"));
        let q = StableQuery::over_own_atoms(&f).relative_to([]);
        let models = stable_models(&q).unwrap();
        assert_eq!(models.len(), 3);
        assert!(is_stable_model(&Interpretation::new(["p", "q"]), &q));
    }

    #[test]
    fn unused_intensional_atom_is_never_true() {
        let top: Formula<&str> = Formula::top();
        let q = StableQuery::new(&top, ["p"]);
        assert!(!is_stable_model(&Interpretation::new(["p"]), &q));
        let q = StableQuery::new(&top, ["p"]).relative_to([]);
        assert_eq!(stable_models(&q).unwrap().len(), 2);
    }

    #[test]
    fn budget_is_reported() {
        let atoms: Vec<String> = (0..12).map(|i| format!("p{i}")).collect();
        let f = Formula::conj(atoms.iter().cloned().map(|a| Formula::choice(Formula::Atom(a))));
        let engine = StableEngine::new(EngineConfig {
            candidate_budget: 100,
        });
        let err = engine
            .stable_models(&StableQuery::over_own_atoms(&f))
            .unwrap_err();
        assert_eq!(err, Error::Engine(EngineError::BudgetExceeded { limit: 100 }));
    }

    #[test]
    fn atoms_outside_universe_are_rejected() {
        let f = Formula::Atom("q");
        let q = StableQuery::new(&f, ["p"]);
        assert!(matches!(
            stable_models(&q),
            Err(Error::Formula(FormulaError::AtomOutsideSignature(_)))
        ));
    }
}
