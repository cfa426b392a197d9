//! Small named spaces used in examples, tests and documentation.

use std::sync::Arc;

use crate::family::{family_from_chars, SetFamily};
use crate::fibers::GeneratorFamily;
use crate::quasi_ordinal::HasseDiagram;
use crate::sequence_space::SequenceSpace;
use crate::state::Domain;

/// Eight concepts in two prerequisite chains `A→C→E→G` and `B→D→F→H`
/// linked by `A→D` and `F→G`: 19 states and 41 learning sequences.
pub fn two_chain_order() -> HasseDiagram {
    let d = Arc::new(Domain::from_chars("ABCDEFGH").expect("valid labels"));
    HasseDiagram::from_labels(
        d,
        &[("A", "C"), ("C", "E"), ("E", "G"), ("B", "D"), ("D", "F"), ("F", "H"), ("A", "D"), ("F", "G")],
    )
    .expect("valid diagram")
}

/// `2n/3` basic concepts each required by all of `n/3` advanced concepts;
/// `n` must be a multiple of 3. Has `2^(2n/3) + 2^(n/3) − 1` states.
pub fn bipartite_prerequisites(n: usize) -> HasseDiagram {
    assert!(n.is_multiple_of(3), "n must be a multiple of 3");
    let lo = 2 * n / 3;
    let labels = (0..lo).map(|i| format!("b{i}")).chain((0..n - lo).map(|i| format!("t{i}")));
    let d = Arc::new(Domain::new(labels).expect("valid labels"));
    let edges = (0..lo).flat_map(|b| (lo..n).map(move |t| (b, t)));
    HasseDiagram::new(d, edges).expect("valid diagram")
}

/// `{∅, A, C, AB, AC, BC, ABC}`: the union of the chains `ABC` and `CBA`.
pub fn three_concept_family() -> SetFamily {
    family_from_chars("ABC", &["{}", "A", "C", "A,B", "A,C", "B,C", "A,B,C"]).expect("valid family")
}

/// The sequences `ABC` and `CBA`.
pub fn three_concept_space() -> SequenceSpace {
    SequenceSpace::from_chars("ABC", &["ABC", "CBA"]).expect("valid sequences")
}

/// Three sequences on six concepts; a space that is not intersection-closed.
pub fn six_concept_space() -> SequenceSpace {
    SequenceSpace::from_chars("ABCDEF", &["ABCDEF", "BDFCAE", "CBEFAD"]).expect("valid sequences")
}

/// Edges of the 5-cycle `a-b-d-e-c-a`. Their union closure is well-graded
/// and union-closed but is not an upper subfamily of any learning space.
pub fn pentagon_generators() -> GeneratorFamily {
    let d = Arc::new(Domain::from_chars("abcde").expect("valid labels"));
    let sets = ["a,b", "b,d", "d,e", "c,e", "a,c"]
        .iter()
        .map(|s| d.parse_state(s).expect("valid state"))
        .collect::<Vec<_>>();
    GeneratorFamily::new(d, sets).expect("valid generators")
}
