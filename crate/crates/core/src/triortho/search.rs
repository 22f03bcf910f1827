use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde_json::json;

use super::dlemma::reference_d;
use super::{code_params, max_span_weight, rank_of, GF2Matrix, SearchCertificate, SearchResult, TriorthoError};

pub const SEARCH_MAX_COLS: usize = 14;
pub const SEARCH_MAX_ROWS: usize = 8;

/// Parity signatures of column values: bit layout is row singles, then row
/// pairs, then row triples. A column contributes to a monomial iff it has a 1
/// in every row of the monomial.
struct Signatures {
    singles_mask: u128,
    table: Vec<u128>,
}

impl Signatures {
    fn new(m: usize) -> Self {
        let mut monomials: Vec<u64> = (0..m).map(|a| 1 << a).collect();
        for a in 0..m {
            for b in a + 1..m {
                monomials.push(1 << a | 1 << b);
            }
        }
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    monomials.push(1 << a | 1 << b | 1 << c);
                }
            }
        }
        debug_assert!(monomials.len() <= 128);
        let table = (0..1u64 << m)
            .map(|v| monomials.iter().enumerate().filter(|(_, &s)| v & s == s).map(|(i, _)| 1u128 << i).sum())
            .collect();
        Signatures { singles_mask: (1u128 << m) - 1, table }
    }

    fn full(&self, v: u64) -> u128 {
        self.table[v as usize]
    }

    /// Pair and triple part only.
    fn higher(&self, v: u64) -> u128 {
        self.table[v as usize] & !self.singles_mask
    }
}

/// Tails of `t` strictly decreasing values keyed by their combined pair/triple
/// signature, each list ordered by its largest value.
struct TailTable {
    t: usize,
    map: HashMap<u128, Vec<[u8; 3]>>,
}

impl TailTable {
    fn new(sig: &Signatures, values: &[u64], t: usize) -> Self {
        let mut map: HashMap<u128, Vec<[u8; 3]>> = HashMap::new();
        let mut stack = Vec::with_capacity(t);
        fn rec(
            sig: &Signatures,
            values: &[u64],
            t: usize,
            below: usize,
            stack: &mut Vec<u64>,
            map: &mut HashMap<u128, Vec<[u8; 3]>>,
        ) {
            if stack.len() == t {
                let key = stack.iter().fold(0u128, |acc, &v| acc ^ sig.higher(v));
                let mut tail = [0u8; 3];
                for (slot, &v) in tail.iter_mut().zip(stack.iter()) {
                    *slot = v as u8;
                }
                map.entry(key).or_default().push(tail);
                return;
            }
            for i in 0..below {
                stack.push(values[i]);
                rec(sig, values, t, i, stack, map);
                stack.pop();
            }
        }
        rec(sig, values, t, values.len(), &mut stack, &mut map);
        for list in map.values_mut() {
            list.sort_unstable();
        }
        TailTable { t, map }
    }
}

struct Leaf<'a> {
    m: usize,
    n: usize,
    k_min: usize,
    require_d2: bool,
    values: &'a [u64],
}

impl Leaf<'_> {
    /// Completes the odd-multiplicity column set `y` with duplicated column pairs
    /// if the side conditions can be met; returns all `n` columns.
    fn complete(&self, y: &[u64]) -> Option<Vec<u64>> {
        let full = (1u64 << self.m) - 1;
        let parity = y.iter().fold(0, |acc, v| acc ^ v);
        if (parity.count_ones() as usize) < self.k_min {
            return None;
        }
        let even_rows = !parity & full;
        if self.require_d2 && y.iter().any(|v| v & even_rows == 0) {
            return None;
        }
        let pairs = (self.n - y.len()) / 2;
        let mut basis: Vec<u64> = y.to_vec();
        let mut rank = rank_of(basis.clone());
        if rank + pairs < self.m {
            return None;
        }
        let usable = |v: u64| v != 0 && (!self.require_d2 || v & even_rows != 0);
        let mut columns = y.to_vec();
        let mut added = 0;
        for &v in self.values {
            if rank == self.m || added == pairs {
                break;
            }
            if !usable(v) {
                continue;
            }
            basis.push(v);
            let r = rank_of(basis.clone());
            if r > rank {
                rank = r;
                columns.extend([v, v]);
                added += 1;
            } else {
                basis.pop();
            }
        }
        if rank < self.m {
            return None;
        }
        let filler = *self.values.iter().find(|&&v| usable(v))?;
        while columns.len() < self.n {
            columns.extend([filler, filler]);
        }
        columns.sort_unstable_by(|a, b| b.cmp(a));
        Some(columns)
    }
}

struct Subtree {
    nodes: u64,
    witness: Option<Vec<u64>>,
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    sig: &Signatures,
    values: &[u64],
    tails: &TailTable,
    leaf: &Leaf,
    prefix_len: usize,
    below: usize,
    acc: u128,
    prefix: &mut Vec<u64>,
    out: &mut Subtree,
) {
    if out.witness.is_some() {
        return;
    }
    if prefix.len() == prefix_len {
        let bound = prefix.last().copied();
        if tails.t == 0 {
            out.nodes += 1;
            if acc == 0 {
                out.witness = leaf.complete(prefix);
            }
            return;
        }
        let Some(list) = tails.map.get(&acc) else { return };
        for tail in list {
            if bound.is_some_and(|b| u64::from(tail[0]) >= b) {
                break;
            }
            out.nodes += 1;
            let mut y = prefix.clone();
            y.extend(tail[..tails.t].iter().map(|&v| u64::from(v)));
            if let Some(cols) = leaf.complete(&y) {
                out.witness = Some(cols);
                return;
            }
        }
        return;
    }
    // leave room for the remaining prefix entries and the tail below this one
    let still_needed = prefix_len - prefix.len() - 1 + tails.t;
    for i in still_needed..below {
        out.nodes += 1;
        let v = values[i];
        prefix.push(v);
        dfs(sig, values, tails, leaf, prefix_len, i, acc ^ sig.higher(v), prefix, out);
        prefix.pop();
        if out.witness.is_some() {
            return;
        }
    }
}

/// Exhaustive search for an `m x n` triorthogonal matrix with `1 <= m <= m_max`,
/// linearly independent rows, at least `k_min` odd rows and (optionally) even
/// rows covering every column.
///
/// Columns are unordered, so a matrix is a multiset of `m`-bit column values.
/// A value used twice contributes nothing to any parity, so the search runs over
/// the set `Y` of values with odd multiplicity; the remaining `(n - |Y|) / 2`
/// duplicated pairs are placed afterwards and only affect rank and coverage.
pub fn search_triorthogonal(
    n: usize,
    m_max: usize,
    k_min: usize,
    require_d2: bool,
) -> Result<SearchCertificate, TriorthoError> {
    if n == 0 || n > SEARCH_MAX_COLS {
        return Err(TriorthoError::Bounds(format!("n must be in 1..={SEARCH_MAX_COLS}, got {n}")));
    }
    let m_cap = n.min(SEARCH_MAX_ROWS);
    if m_max == 0 || m_max > m_cap {
        return Err(TriorthoError::Bounds(format!("m_max must be in 1..={m_cap}, got {m_max}")));
    }

    let mut nodes = 0u64;
    let mut witness = None;
    let mut explored_m = 0;
    'outer: for m in 1..=m_max {
        if k_min > m {
            explored_m = m;
            continue;
        }
        let sig = Signatures::new(m);
        // zero columns can never be covered by an even row
        let first = u64::from(require_d2);
        let values: Vec<u64> = (first..1 << m).collect();
        let max_tail = if m <= 7 { 3 } else { 2 };
        let tables: Vec<TailTable> = (0..=max_tail).map(|t| TailTable::new(&sig, &values, t)).collect();
        let leaf = Leaf { m, n, k_min, require_d2, values: &values };
        for size in (n % 2..=n.min(values.len())).step_by(2) {
            let t = size.min(max_tail);
            let prefix_len = size - t;
            let tails = &tables[t];
            if prefix_len == 0 {
                let mut out = Subtree { nodes: 0, witness: None };
                dfs(&sig, &values, tails, &leaf, 0, values.len(), 0, &mut Vec::new(), &mut out);
                nodes += out.nodes;
                if out.witness.is_some() {
                    witness = out.witness;
                    explored_m = m;
                    break 'outer;
                }
                continue;
            }
            let first_choices: Vec<usize> = (size - 1..values.len()).collect();
            let subtrees: Vec<Subtree> = first_choices
                .par_iter()
                .map(|&i| {
                    let v = values[i];
                    let mut out = Subtree { nodes: 1, witness: None };
                    let mut prefix = vec![v];
                    dfs(&sig, &values, tails, &leaf, prefix_len, i, sig.higher(v), &mut prefix, &mut out);
                    out
                })
                .collect();
            for s in subtrees {
                nodes += s.nodes;
                if s.witness.is_some() {
                    witness = s.witness;
                    explored_m = m;
                    break 'outer;
                }
            }
        }
        explored_m = m;
    }

    let mut details = BTreeMap::new();
    let result = match witness {
        Some(cols) => {
            let matrix = GF2Matrix::from_columns(explored_m, &cols)?;
            let params = code_params(&matrix)?;
            let verified = matrix.is_triorthogonal()
                && params.k >= k_min
                && (!require_d2 || params.distance_at_least_2)
                && matrix.num_cols() == n;
            details.insert("witness_code_params".into(), json!(params));
            details.insert("witness_reverified".into(), json!(verified));
            assert!(verified, "search produced an invalid witness");
            SearchResult::Witness { matrix }
        }
        None => SearchResult::NoneFound,
    };

    let mut constraints = vec![
        "pairwise even overlap".to_string(),
        "triple-wise even overlap".to_string(),
        "linearly independent rows".to_string(),
        format!("at least {k_min} odd-weight rows"),
    ];
    if require_d2 {
        constraints.push("even-weight rows cover every column".into());
    }
    Ok(SearchCertificate {
        search: "triorthogonal".into(),
        n_range: [n, n],
        m_range: [1, explored_m],
        constraints,
        symmetry_reductions: vec![
            "columns as a multiset of m-bit values in non-increasing order (column permutations)".into(),
            "column multiplicities reduced mod 2; duplicated pairs placed after the parity search".into(),
            "last two or three odd-multiplicity values resolved by signature lookup".into(),
        ],
        nodes,
        result,
        details,
    })
}

/// Constrained search for a 14-column triorthogonal matrix with two odd rows in
/// the block form `(A B / C D / 1 0)`: `D` is the 2x6 minimal block, the all-ones
/// row spans the left 8 columns, and `A`, `B`, `C` are free.
///
/// The left columns (multisets of 4-bit `A/C` values under the all-ones row) and
/// the right columns (2-bit `B` values over each fixed `D` column) are matched by
/// their parity signatures.
pub fn complete_14_qubit_code() -> Result<SearchCertificate, TriorthoError> {
    const W: usize = 8;
    const M: usize = 5;
    let d = reference_d();
    let u = d.num_cols();
    let sig = Signatures::new(M);
    // rows 0,1 odd; rows 2,3,4 even; every pair and triple even
    let target: u128 = 0b00011;

    let d_cols: Vec<u64> = d.columns().iter().map(|c| c << 2).collect();
    let mut right: HashMap<u128, Vec<u32>> = HashMap::new();
    for assign in 0u32..1 << (2 * u) {
        let key = right_columns(&d_cols, assign).iter().fold(0u128, |acc, &c| acc ^ sig.full(c));
        right.entry(key).or_default().push(assign);
    }

    let left_values: Vec<u64> = (0..16u64).map(|v| v | 1 << 4).collect();
    let mut nodes = 0u64;
    let mut found = None;
    let mut stack = Vec::with_capacity(W);
    left_dfs(&left_values, &sig, W, left_values.len(), 0, &mut stack, &mut nodes, &mut |left, acc, nodes| {
        let Some(cands) = right.get(&(acc ^ target)) else { return false };
        for &assign in cands {
            *nodes += 1;
            let mut cols = left.to_vec();
            cols.extend(right_columns(&d_cols, assign));
            if rank_of(cols.clone()) == M {
                found = Some(cols);
                return true;
            }
        }
        false
    });

    let mut details = BTreeMap::new();
    let result = match found {
        Some(cols) => {
            let matrix = GF2Matrix::from_columns(M, &cols)?;
            let params = code_params(&matrix)?;
            let (_, g0) = matrix.split_by_parity();
            details.insert("witness_code_params".into(), json!(params));
            details.insert("witness_triorthogonal".into(), json!(matrix.is_triorthogonal()));
            details.insert("g0_max_span_weight".into(), json!(max_span_weight(&g0)?));
            SearchResult::Witness { matrix }
        }
        None => SearchResult::NoneFound,
    };
    Ok(SearchCertificate {
        search: "complete-14".into(),
        n_range: [W + u, W + u],
        m_range: [M, M],
        constraints: vec![
            "block form (A B / C D / 1 0) with w = 8, u = 6".into(),
            format!("D fixed to {}", d.row_strings().join("/")),
            "pairwise and triple-wise even overlap".into(),
            "rows 1-2 odd weight, rows 3-5 even weight".into(),
            "linearly independent rows".into(),
        ],
        symmetry_reductions: vec!["left 8 columns in non-increasing order (column permutations)".into()],
        nodes,
        result,
        details,
    })
}

fn right_columns(d_cols: &[u64], assign: u32) -> Vec<u64> {
    d_cols.iter().enumerate().map(|(j, &dc)| dc | u64::from(assign >> (2 * j) & 0b11)).collect()
}

#[allow(clippy::too_many_arguments)]
fn left_dfs(
    values: &[u64],
    sig: &Signatures,
    width: usize,
    below: usize,
    acc: u128,
    stack: &mut Vec<u64>,
    nodes: &mut u64,
    visit: &mut impl FnMut(&[u64], u128, &mut u64) -> bool,
) -> bool {
    if stack.len() == width {
        return visit(stack, acc, nodes);
    }
    // non-increasing, repeats allowed
    for i in (0..below).rev() {
        *nodes += 1;
        stack.push(values[i]);
        let done = left_dfs(values, sig, width, i + 1, acc ^ sig.full(values[i]), stack, nodes, visit);
        stack.pop();
        if done {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over all m x n matrices for tiny sizes.
    fn brute_force_exists(n: usize, m_max: usize, k_min: usize, d2: bool) -> bool {
        (1..=m_max).any(|m| {
            (0u64..1 << (m * n)).any(|bits| {
                let rows: Vec<u64> = (0..m).map(|i| bits >> (i * n) & ((1 << n) - 1)).collect();
                let g = GF2Matrix::new(n, rows).unwrap();
                g.is_triorthogonal() && code_params(&g).is_ok_and(|p| p.k >= k_min && (!d2 || p.distance_at_least_2))
            })
        })
    }

    #[test]
    fn agrees_with_brute_force_on_tiny_sizes() {
        for n in 1..=5 {
            for m_max in 1..=n.min(3) {
                for k_min in 0..=1 {
                    for d2 in [false, true] {
                        if m_max * n > 15 {
                            continue;
                        }
                        let cert = search_triorthogonal(n, m_max, k_min, d2).unwrap();
                        assert_eq!(
                            cert.witness().is_some(),
                            brute_force_exists(n, m_max, k_min, d2),
                            "n={n} m_max={m_max} k_min={k_min} d2={d2}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_witnesses() {
        let cert = search_triorthogonal(3, 2, 1, false).unwrap();
        let w = cert.witness().unwrap();
        assert_eq!(w.row_strings(), vec!["111"]);
        let cert = search_triorthogonal(4, 2, 0, false).unwrap();
        assert!(cert.witness().is_some());
        assert!(cert.nodes < 10);
    }

    #[test]
    fn six_columns_none_found() {
        let cert = search_triorthogonal(6, 4, 1, true).unwrap();
        assert!(cert.is_none_found());
        assert_eq!(cert.m_range, [1, 4]);
        assert!(cert.nodes > 0);
    }

    #[test]
    fn fourteen_columns_found_by_general_search() {
        let cert = search_triorthogonal(14, 5, 2, true).unwrap();
        let w = cert.witness().expect("witness");
        let p = code_params(w).unwrap();
        assert!(w.is_triorthogonal() && p.k >= 2 && p.distance_at_least_2);
    }

    #[test]
    fn bounds() {
        assert!(search_triorthogonal(15, 3, 1, true).is_err());
        assert!(search_triorthogonal(5, 6, 1, true).is_err());
        assert!(search_triorthogonal(10, 9, 1, true).is_err());
        assert!(search_triorthogonal(0, 1, 1, true).is_err());
    }

    #[test]
    fn deterministic_under_threads() {
        let a = search_triorthogonal(7, 5, 1, true).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| search_triorthogonal(7, 5, 1, true).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn complete_14() {
        let cert = complete_14_qubit_code().unwrap();
        let w = cert.witness().expect("witness");
        assert!(w.is_triorthogonal());
        assert_eq!(code_params(w).unwrap(), super::super::CodeParams { n: 14, k: 2, distance_at_least_2: true });
        // right block rows 3-4 are D
        let d = reference_d();
        for (r, &drow) in d.rows().iter().enumerate() {
            assert_eq!(w.rows()[2 + r] >> 8, drow);
        }
        assert_eq!(w.rows()[4], 0xff);
    }
}
