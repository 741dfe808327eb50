//! Edit-distance primitives.

use std::fmt;

use serde::Serialize;

use crate::resources::KeyboardLayout;

/// Number of unit-cost edit operations between two strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct EditDistance(pub usize);

impl EditDistance {
    pub fn value(self) -> usize {
        self.0
    }
}

impl fmt::Display for EditDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Unrestricted Damerau-Levenshtein distance over bytes.
///
/// Insertions, deletions, substitutions and adjacent transpositions all
/// cost one, and a transposed pair may be edited again afterwards. This is
/// the Lowrance-Wagner recurrence, which is a true metric (unlike the
/// optimal-string-alignment variant: `("ca", "abc")` is 2 here, 3 there).
pub fn damerau_levenshtein(a: &str, b: &str) -> EditDistance {
    let a = a.as_bytes();
    let b = b.as_bytes();
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return EditDistance(n.max(m));
    }

    let inf = n + m;
    let width = m + 2;
    // Row/column 0 hold the sentinel, row/column 1 the empty-prefix costs.
    let mut table = vec![0usize; (n + 2) * width];
    let at = |i: usize, j: usize| i * width + j;
    table[at(0, 0)] = inf;
    for i in 0..=n {
        table[at(i + 1, 0)] = inf;
        table[at(i + 1, 1)] = i;
    }
    for j in 0..=m {
        table[at(0, j + 1)] = inf;
        table[at(1, j + 1)] = j;
    }

    // Last row in which each byte value was seen in `a`.
    let mut last_row = [0usize; 256];
    for i in 1..=n {
        let mut last_match_col = 0;
        for j in 1..=m {
            let i1 = last_row[b[j - 1] as usize];
            let j1 = last_match_col;
            let cost = if a[i - 1] == b[j - 1] {
                last_match_col = j;
                0
            } else {
                1
            };
            let substitute = table[at(i, j)] + cost;
            let insert = table[at(i + 1, j)] + 1;
            let delete = table[at(i, j + 1)] + 1;
            let transpose = table[at(i1, j1)] + (i - i1 - 1) + 1 + (j - j1 - 1);
            table[at(i + 1, j + 1)] = substitute.min(insert).min(delete).min(transpose);
        }
        last_row[a[i - 1] as usize] = i;
    }
    EditDistance(table[at(n + 1, m + 1)])
}

/// True when `a` and `b` differ by exactly one substitution whose two
/// characters are neighbours on `layout`.
pub fn keyboard_distance_one(a: &str, b: &str, layout: &KeyboardLayout) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut diffs = a.bytes().zip(b.bytes()).filter(|(x, y)| x != y);
    match (diffs.next(), diffs.next()) {
        (Some((x, y)), None) => layout.is_adjacent(x as char, y as char),
        _ => false,
    }
}
