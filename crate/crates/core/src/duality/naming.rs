//! Names the visitor form introduces, derived from operation and subtype
//! names so the inverse can find them again without a trace.

pub const VISITOR: &str = "Visitor";
pub const ACCEPT: &str = "accept";
pub const TYPE_VAR: &str = "T";
pub const VISITOR_PARAM: &str = "v";

fn capitalize(s: &str) -> String {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

/// `eval` → `EvalVisitor`.
pub fn visitor_class(op: &str) -> String {
    format!("{}Visitor", capitalize(op))
}

/// `Num` → `visitNum`.
pub fn visit_method(subtype: &str) -> String {
    format!("visit{subtype}")
}

/// `Num` → `num`: the visit method's parameter.
pub fn visit_param(subtype: &str) -> String {
    let mut cs = subtype.chars();
    match cs.next() {
        Some(c) => c.to_lowercase().chain(cs).collect(),
        None => String::new(),
    }
}
