use std::collections::BTreeMap;
use std::fmt;

use crate::lang::{Expr, MethodDecl, Program, Stmt};

use super::detect::HierarchyInfo;

/// Subtype × operation grid of business-code owners.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverageMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    /// `(subtype, operation)` to owning class; missing keys are absent cells.
    pub cells: BTreeMap<(String, String), String>,
}

impl CoverageMatrix {
    pub fn owner(&self, subtype: &str, op: &str) -> Option<&str> {
        self.cells.get(&(subtype.to_string(), op.to_string())).map(String::as_str)
    }
}

/// Whether `m` only forwards: a single call whose receiver and arguments are
/// each `this`, a parameter or `new X()`, to a method accepted by `callee_ok`.
pub fn is_delegating(m: &MethodDecl, callee_ok: &dyn Fn(&str) -> bool) -> bool {
    let atom = |e: &Expr| match e {
        Expr::This => true,
        Expr::Var(v) => m.params.iter().any(|p| &p.name == v),
        Expr::New(_, args) => args.is_empty(),
        _ => false,
    };
    match m.body.as_deref() {
        Some([Stmt::Return(Expr::Call(t, callee, args))]) | Some([Stmt::Expr(Expr::Call(t, callee, args))]) => {
            atom(t) && args.iter().all(atom) && callee_ok(callee)
        }
        _ => false,
    }
}

/// Who holds the business code of each (subtype, operation) pair: the
/// subtype when it defines a non-delegating body, else the operation's
/// visitor class when its visit method does.
pub fn coverage_matrix(p: &Program, h: &HierarchyInfo) -> CoverageMatrix {
    let mut m = CoverageMatrix {
        rows: h.subtypes.clone(),
        cols: h.operations.iter().map(|o| o.name.clone()).collect(),
        cells: BTreeMap::new(),
    };
    for op in &m.cols {
        let forwards = |callee: &str| {
            callee == op || h.accept.as_deref() == Some(callee) || h.visit_methods.values().any(|v| v == callee)
        };
        for s in &m.rows {
            let business = |md: Option<&MethodDecl>| md.is_some_and(|md| md.body.is_some() && !is_delegating(md, &forwards));
            let owner = if business(p.class(s).and_then(|c| c.method(op))) {
                Some(s.clone())
            } else {
                h.visitor_classes.get(op).filter(|v| {
                    let visit = h.visit_methods.get(s);
                    business(p.class(v).and_then(|c| visit.and_then(|vm| c.method(vm))))
                })
                .cloned()
            };
            if let Some(o) = owner {
                m.cells.insert((s.clone(), op.clone()), o);
            }
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureClass {
    DataOriented,
    FunctionOriented,
    /// Offending `(subtype, operation)` cells relative to the nearer pure form.
    Mixed(Vec<(String, String)>),
}

impl fmt::Display for StructureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureClass::DataOriented => f.write_str("DataOriented"),
            StructureClass::FunctionOriented => f.write_str("FunctionOriented"),
            StructureClass::Mixed(cells) => {
                let list: Vec<String> = cells.iter().map(|(s, o)| format!("{s}.{o}")).collect();
                write!(f, "Mixed (offending cells: {})", list.join(", "))
            }
        }
    }
}

pub fn classify(m: &CoverageMatrix) -> StructureClass {
    let cell = |s: &String, o: &String| m.cells.get(&(s.clone(), o.clone()));
    let mut data_off = Vec::new();
    let mut fun_off = Vec::new();
    for o in &m.cols {
        // the column's majority owner, first seen wins ties
        let mut counts: Vec<(&String, usize)> = Vec::new();
        for s in &m.rows {
            if let Some(c) = cell(s, o) {
                match counts.iter_mut().find(|(n, _)| *n == c) {
                    Some(e) => e.1 += 1,
                    None => counts.push((c, 1)),
                }
            }
        }
        let best = counts.iter().map(|e| e.1).max().unwrap_or(0);
        let major = counts.iter().find(|e| e.1 == best).map(|e| e.0);
        let major_is_subtype = major.is_some_and(|c| m.rows.contains(c));
        for s in &m.rows {
            let owner = cell(s, o);
            if owner != Some(s) {
                data_off.push((s.clone(), o.clone()));
            }
            if owner.is_none() || owner != major || (major_is_subtype && m.rows.len() > 1) {
                fun_off.push((s.clone(), o.clone()));
            }
        }
    }
    if data_off.is_empty() {
        StructureClass::DataOriented
    } else if fun_off.is_empty() {
        StructureClass::FunctionOriented
    } else if fun_off.len() < data_off.len() {
        StructureClass::Mixed(fun_off)
    } else {
        StructureClass::Mixed(data_off)
    }
}

/// Aligned text table; absent cells print as `-`.
pub fn render_matrix(m: &CoverageMatrix) -> String {
    let mut table: Vec<Vec<String>> = Vec::with_capacity(m.rows.len() + 1);
    table.push(std::iter::once("subtype".to_string()).chain(m.cols.iter().cloned()).collect());
    for s in &m.rows {
        let mut row = vec![s.clone()];
        for o in &m.cols {
            row.push(m.owner(s, o).unwrap_or("-").to_string());
        }
        table.push(row);
    }
    let widths: Vec<usize> = (0..=m.cols.len())
        .map(|i| table.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &table {
        let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Names the offending cells of a mixed structure by row or column when
/// they fill one, e.g. `Mixed: offending column check`.
pub fn explain(class: &StructureClass, m: &CoverageMatrix) -> String {
    let StructureClass::Mixed(cells) = class else { return class.to_string() };
    let list: Vec<String> = cells.iter().map(|(s, o)| format!("{s}.{o}")).collect();
    let same = |pick: fn(&(String, String)) -> &String| cells.iter().all(|c| pick(c) == pick(&cells[0]));
    let head = if cells.is_empty() {
        "Mixed".to_string()
    } else if same(|c| &c.1) && cells.len() == m.rows.len() {
        format!("Mixed: offending column {}", cells[0].1)
    } else if same(|c| &c.0) && cells.len() == m.cols.len() {
        format!("Mixed: offending row {}", cells[0].0)
    } else if same(|c| &c.0) {
        format!("Mixed: offending cells in row {}", cells[0].0)
    } else if same(|c| &c.1) {
        format!("Mixed: offending cells in column {}", cells[0].1)
    } else {
        "Mixed: offending cells".to_string()
    };
    format!("{head} ({})", list.join(", "))
}

/// One `subtype,operation,owner` line per cell, row-major; absent cells
/// have an empty owner.
pub fn matrix_csv(m: &CoverageMatrix) -> String {
    let mut out = String::from("subtype,operation,owner\n");
    for s in &m.rows {
        for o in &m.cols {
            out.push_str(&format!("{s},{o},{}\n", m.owner(s, o).unwrap_or("")));
        }
    }
    out
}
