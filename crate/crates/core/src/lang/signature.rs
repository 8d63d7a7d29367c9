use serde::{Deserialize, Serialize};

use super::ast::{Callable, SubjectDecl, TypeTag};

/// Resolved callable signature shared by test statements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallableSig {
    pub key: String,
    pub owner: String,
    pub name: String,
    pub params: Vec<TypeTag>,
    /// Constructors return their owner type; `None` is void.
    pub ret: Option<TypeTag>,
    /// Flat callable index in the unit the signature was resolved against.
    pub flat: usize,
    pub is_ctor: bool,
}

/// `OWNER|NAME(T1, T2, ...)RET`; constructors are named `<init>` and return
/// the owner type, void renders as `V`.
pub fn signature_key(callable: &Callable, owner: &SubjectDecl) -> String {
    let params = callable
        .params
        .iter()
        .map(|p| p.ty.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    let ret = if callable.is_ctor() {
        owner.name.clone()
    } else {
        match &callable.ret {
            Some(t) => t.to_string(),
            None => "V".to_string(),
        }
    };
    format!("{}|{}({}){}", owner.name, callable.name, params, ret)
}
