use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::Fsa;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

// Edges sharing endpoints are merged; a set covering more than half the
// alphabet is written as its complement, `Σ∖{…}`.
fn edge_label(symbols: &[usize], alphabet: &[String]) -> String {
    if symbols.len() == alphabet.len() {
        return "Σ".to_string();
    }
    if symbols.len() * 2 > alphabet.len() {
        let rest: Vec<&str> = (0..alphabet.len())
            .filter(|a| !symbols.contains(a))
            .map(|a| alphabet[a].as_str())
            .collect();
        return format!("Σ∖{{{}}}", rest.join(","));
    }
    symbols.iter().map(|&a| alphabet[a].as_str()).collect::<Vec<_>>().join(",")
}

pub(super) fn render(f: &Fsa) -> String {
    let mut s = String::from("digraph fsa {\n  rankdir=LR;\n  __start [shape=point];\n");
    for q in 0..f.state_count() {
        let shape = if f.is_accepting(q) { "doublecircle" } else { "circle" };
        let _ = writeln!(s, "  q{q} [shape={shape}, label={}];", quote(&f.label(q)));
    }
    let _ = writeln!(s, "  __start -> q{};", f.initial());
    for q in 0..f.state_count() {
        let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (a, t) in f.edges(q) {
            grouped.entry(t).or_default().push(a);
        }
        for (t, syms) in grouped {
            let _ = writeln!(s, "  q{q} -> q{t} [label={}];", quote(&edge_label(&syms, f.alphabet())));
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_loops_use_complement_labels() {
        let alpha: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        assert_eq!(edge_label(&[1, 2], &alpha), "Σ∖{a}");
        assert_eq!(edge_label(&[0], &alpha), "a");
        assert_eq!(edge_label(&[0, 1, 2], &alpha), "Σ");
    }
}
