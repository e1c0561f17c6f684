use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub const ALL: [BinOp; 4] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    pub(crate) fn tag(self) -> &'static str {
        match self {
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::Div => "div",
        }
    }
}

/// Built-in functions callable from the DSL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Min,
    Max,
    Abs,
    Sqrt,
    Exp,
    Log,
    Pow,
    /// `if_gt(a, b, x, y)` yields `x` when `a > b`, otherwise `y`.
    IfGt,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Min,
        Func::Max,
        Func::Abs,
        Func::Sqrt,
        Func::Exp,
        Func::Log,
        Func::Pow,
        Func::IfGt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Min => "min",
            Func::Max => "max",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Pow => "pow",
            Func::IfGt => "if_gt",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Abs | Func::Sqrt | Func::Exp | Func::Log => 1,
            Func::Min | Func::Max | Func::Pow => 2,
            Func::IfGt => 4,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn num(value: f64) -> Expr {
        Expr::Num(value)
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(inner: Expr) -> Expr {
        Expr::Neg(Box::new(inner))
    }

    /// Direct children in left-to-right order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Num(_) | Expr::Var(_) => Vec::new(),
            Expr::Neg(inner) => vec![inner],
            Expr::Binary(_, l, r) => vec![l, r],
            Expr::Call(_, args) => args.iter().collect(),
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Expr> {
        match self {
            Expr::Num(_) | Expr::Var(_) => Vec::new(),
            Expr::Neg(inner) => vec![inner.as_mut()],
            Expr::Binary(_, l, r) => vec![l.as_mut(), r.as_mut()],
            Expr::Call(_, args) => args.iter_mut().collect(),
        }
    }

    /// Height of the tree; a leaf has depth 1.
    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Expr::depth)
            .max()
            .unwrap_or(0)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Expr::Num(_) | Expr::Var(_))
    }

    /// Pre-order traversal.
    pub fn preorder(&self) -> Vec<&Expr> {
        let mut out = Vec::with_capacity(self.size());
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            let children = node.children();
            stack.extend(children.into_iter().rev());
        }
        out
    }

    /// Variable occurrences in pre-order, duplicates kept.
    pub fn variables(&self) -> Vec<&str> {
        self.preorder()
            .into_iter()
            .filter_map(|e| match e {
                Expr::Var(name) => Some(name.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn literal_count(&self) -> usize {
        self.preorder()
            .into_iter()
            .filter(|e| matches!(e, Expr::Num(_)))
            .count()
    }

    /// Returns the node at the given pre-order index.
    pub fn node_at(&self, index: usize) -> Option<&Expr> {
        self.preorder().get(index).copied()
    }

    pub fn node_at_mut(&mut self, index: usize) -> Option<&mut Expr> {
        let mut remaining = index;
        node_at_mut_rec(self, &mut remaining)
    }

    pub fn for_each_mut(&mut self, f: &mut impl FnMut(&mut Expr)) {
        f(self);
        for child in self.children_mut() {
            child.for_each_mut(f);
        }
    }

    pub fn rename_vars(&mut self, map: &impl Fn(&str) -> Option<String>) {
        self.for_each_mut(&mut |e| {
            if let Expr::Var(name) = e {
                if let Some(new) = map(name) {
                    *name = new;
                }
            }
        });
    }
}

fn node_at_mut_rec<'a>(expr: &'a mut Expr, remaining: &mut usize) -> Option<&'a mut Expr> {
    if *remaining == 0 {
        return Some(expr);
    }
    *remaining -= 1;
    for child in expr.children_mut() {
        let size = child.size();
        if *remaining < size {
            return node_at_mut_rec(child, remaining);
        }
        *remaining -= size;
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct LetBinding {
    pub name: String,
    pub value: Expr,
}

/// A candidate scoring function: a sequence of let-bindings and a returned
/// expression over task-provided input variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub input_vars: Vec<String>,
    pub statements: Vec<LetBinding>,
    pub result: Expr,
}

/// Pre-order index of an expression node, counted across the let-binding
/// right-hand sides in order and then the result expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site(pub usize);

impl Program {
    pub fn expressions(&self) -> impl Iterator<Item = &Expr> {
        self.statements
            .iter()
            .map(|s| &s.value)
            .chain(std::iter::once(&self.result))
    }

    /// Total number of expression nodes (and therefore of valid sites).
    pub fn site_count(&self) -> usize {
        self.expressions().map(Expr::size).sum()
    }

    /// Maximum expression depth over all statements.
    pub fn depth(&self) -> usize {
        self.expressions().map(Expr::depth).max().unwrap_or(0)
    }

    pub fn literal_count(&self) -> usize {
        self.expressions().map(Expr::literal_count).sum()
    }

    /// Splits a site into (statement index, local pre-order index); the
    /// statement index equals `statements.len()` for the result expression.
    pub(crate) fn locate(&self, site: Site) -> Option<(usize, usize)> {
        let mut offset = site.0;
        for (i, expr) in self.expressions().enumerate() {
            let size = expr.size();
            if offset < size {
                return Some((i, offset));
            }
            offset -= size;
        }
        None
    }

    pub fn subtree(&self, site: Site) -> Option<&Expr> {
        let (stmt, local) = self.locate(site)?;
        self.expression(stmt).node_at(local)
    }

    pub(crate) fn expression(&self, stmt: usize) -> &Expr {
        if stmt < self.statements.len() {
            &self.statements[stmt].value
        } else {
            &self.result
        }
    }

    pub(crate) fn expression_mut(&mut self, stmt: usize) -> &mut Expr {
        if stmt < self.statements.len() {
            &mut self.statements[stmt].value
        } else {
            &mut self.result
        }
    }

    /// Identifiers visible at a site: inputs, then let-bindings defined
    /// before the enclosing statement.
    pub fn scope_at(&self, site: Site) -> Option<Vec<String>> {
        let (stmt, _) = self.locate(site)?;
        Some(self.scope_before(stmt))
    }

    pub(crate) fn scope_before(&self, stmt: usize) -> Vec<String> {
        self.input_vars
            .iter()
            .cloned()
            .chain(self.statements[..stmt].iter().map(|s| s.name.clone()))
            .collect()
    }

    /// Checks the scoping invariants: unique bindings disjoint from the
    /// inputs, and no forward or undefined references.
    pub fn validate(&self) -> Result<(), super::DslError> {
        use super::DslError;
        let mut scope: Vec<&str> = self.input_vars.iter().map(String::as_str).collect();
        for stmt in &self.statements {
            check_refs(&stmt.value, &scope)?;
            if scope.contains(&stmt.name.as_str()) {
                return Err(DslError::DuplicateBinding(stmt.name.clone()));
            }
            scope.push(&stmt.name);
        }
        check_refs(&self.result, &scope)?;
        fn check_refs(expr: &Expr, scope: &[&str]) -> Result<(), DslError> {
            match expr.variables().into_iter().find(|v| !scope.contains(v)) {
                Some(v) => Err(DslError::UndefinedVariable(v.to_string())),
                None => Ok(()),
            }
        }
        Ok(())
    }
}
