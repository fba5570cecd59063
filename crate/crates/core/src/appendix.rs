//! The six published example orbits (two figures), with their exact vertex
//! sequences.

use crate::quiver::{ExchangeTriple, MutationSequence};

const SEQUENCES: &str = include_str!("../data/appendix_sequences.txt");

const QUIVERS: [(&str, [f64; 3]); 6] = [
    ("figure1-left", [-0.02, -0.01, 0.03]),
    ("figure1-center", [-0.9, -0.22, 0.7106]),
    ("figure1-right", [-0.84, -0.26, 0.11]),
    ("figure2-first", [-0.6, -0.43, 0.567]),
    ("figure2-center", [-0.6, -0.43, 0.567]),
    ("figure2-last", [-0.6, -0.43, 0.567]),
];

#[derive(Clone, Debug, PartialEq)]
pub struct AppendixRun {
    pub label: &'static str,
    pub quiver: ExchangeTriple,
    pub sequence: MutationSequence,
}

pub fn appendix_runs() -> Vec<AppendixRun> {
    let lines: Vec<&str> = SEQUENCES.lines().filter(|l| !l.trim().is_empty()).collect();
    assert_eq!(
        lines.len(),
        QUIVERS.len(),
        "vendored sequence file is malformed"
    );
    QUIVERS
        .iter()
        .zip(lines)
        .map(|((label, w), line)| AppendixRun {
            label,
            quiver: ExchangeTriple::from_weights(*w).expect("finite"),
            sequence: line.parse().expect("vendored sequence parses"),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_and_alternation() {
        let runs = appendix_runs();
        let lengths: Vec<usize> = runs.iter().map(|r| r.sequence.len()).collect();
        assert_eq!(lengths, [150, 100, 125, 100, 100, 125]);
        for r in &runs {
            assert!(r.sequence.windows(2).all(|w| w[0] != w[1]), "{}", r.label);
        }
    }
}
