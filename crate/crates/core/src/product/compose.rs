//! Composition of per-component specifications and environments into joint
//! models over concatenated bit alphabets.

use std::collections::HashMap;

use num::BigRational;

use crate::error::Error;
use crate::model::{CostAutomaton, JointAlphabet, LabeledMdp, Letter};

/// Synchronous product of two cost automata over disjoint interface bits.
///
/// Each component reads the projection of the joint letter onto its own
/// bits; costs add componentwise; a product state is safe iff both
/// components are. Only reachable states are kept.
pub fn compose_cost_automata(
    a: &CostAutomaton,
    b: &CostAutomaton,
) -> Result<CostAutomaton, Error> {
    let inputs = a.alphabet.input.concat(&b.alphabet.input)?;
    let outputs = a.alphabet.output.concat(&b.alphabet.output)?;
    let alphabet = JointAlphabet::new(inputs, outputs);

    let initial = (a.initial, b.initial);
    let mut index = HashMap::new();
    index.insert(initial, 0);
    let mut order = vec![initial];
    let mut delta = Vec::new();
    let mut safe = Vec::new();
    let mut cost1 = Vec::new();
    let mut cost2 = Vec::new();
    let mut cursor = 0;
    while cursor < order.len() {
        let (qa, qb) = order[cursor];
        let mut row = Vec::with_capacity(alphabet.len());
        let mut row1 = Vec::with_capacity(alphabet.len());
        let mut row2 = Vec::with_capacity(alphabet.len());
        for j in 0..alphabet.len() {
            let joint = Letter(j);
            let (l, o) = alphabet.split(joint);
            let (la, lb) = a.alphabet.input.split_concat(&b.alphabet.input, l);
            let (oa, ob) = a.alphabet.output.split_concat(&b.alphabet.output, o);
            let ja = a.alphabet.joint(la, oa);
            let jb = b.alphabet.joint(lb, ob);
            let next = (a.step(qa, ja), b.step(qb, jb));
            let target = *index.entry(next).or_insert_with(|| {
                order.push(next);
                order.len() - 1
            });
            row.push(target);
            let (a1, a2) = a.costs(qa, ja);
            let (b1, b2) = b.costs(qb, jb);
            row1.push(a1 + b1);
            row2.push(a2 + b2);
        }
        delta.push(row);
        cost1.push(row1);
        cost2.push(row2);
        safe.push(a.safe[qa] && b.safe[qb]);
        cursor += 1;
    }
    let states = order
        .iter()
        .map(|(qa, qb)| format!("{}.{}", a.states[*qa], b.states[*qb]))
        .collect();
    Ok(CostAutomaton {
        alphabet,
        states,
        initial: 0,
        delta,
        safe,
        cost1,
        cost2,
    })
}

/// Independent product of two environment models: joint labels pair the
/// component labels, the joint action letter is split between the
/// components, and probabilities multiply. Only reachable states are kept.
///
/// Label-determinism is preserved: equal joint labels of two positive
/// successors force equal component labels, hence equal component states.
pub fn compose_environments(a: &LabeledMdp, b: &LabeledMdp) -> Result<LabeledMdp, Error> {
    let inputs = a.inputs.concat(&b.inputs)?;
    let actions = a.actions.concat(&b.actions)?;

    let joint_label = |ma: usize, mb: usize| -> Letter {
        Letter(a.labels[ma].0 * b.inputs.len() + b.labels[mb].0)
    };

    let initial = (a.initial, b.initial);
    let mut index = HashMap::new();
    index.insert(initial, 0);
    let mut order = vec![initial];
    let mut trans: Vec<Vec<Vec<(usize, BigRational)>>> = Vec::new();
    let mut cursor = 0;
    while cursor < order.len() {
        let (ma, mb) = order[cursor];
        let mut rows = Vec::with_capacity(actions.len());
        for act in 0..actions.len() {
            let (acta, actb) = a.actions.split_concat(&b.actions, Letter(act));
            let mut dist = Vec::new();
            for (na, pa) in a.successors(ma, acta) {
                for (nb, pb) in b.successors(mb, actb) {
                    let key = (*na, *nb);
                    let target = *index.entry(key).or_insert_with(|| {
                        order.push(key);
                        order.len() - 1
                    });
                    dist.push((target, pa * pb));
                }
            }
            dist.sort_by_key(|(t, _)| *t);
            rows.push(dist);
        }
        trans.push(rows);
        cursor += 1;
    }
    let states = order
        .iter()
        .map(|(ma, mb)| format!("{}.{}", a.states[*ma], b.states[*mb]))
        .collect();
    let labels = order.iter().map(|(ma, mb)| joint_label(*ma, *mb)).collect();
    Ok(LabeledMdp {
        inputs,
        actions,
        states,
        initial: 0,
        labels,
        trans,
    })
}
