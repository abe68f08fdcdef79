use std::collections::HashMap;
use std::fmt;

use super::TraceError;

/// Interned variable token.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

/// Interned value token. Values share one table across all variables.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValueId(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    Read,
    Write,
}

impl OpKind {
    pub fn mnemonic(self) -> &'static str {
        match self {
            OpKind::Read => "r",
            OpKind::Write => "w",
        }
    }
}

/// A memory operation over interned tokens.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Operation {
    pub kind: OpKind,
    pub var: VarId,
    pub value: ValueId,
}

impl Operation {
    pub fn is_read(&self) -> bool {
        self.kind == OpKind::Read
    }

    pub fn is_write(&self) -> bool {
        self.kind == OpKind::Write
    }
}

/// A memory operation spelled with raw tokens, used to build programs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TokenOp {
    pub kind: OpKind,
    pub variable: String,
    pub value: String,
}

/// `r(x, d)`
pub fn r(variable: impl Into<String>, value: impl ToString) -> TokenOp {
    TokenOp {
        kind: OpKind::Read,
        variable: variable.into(),
        value: value.to_string(),
    }
}

/// `w(x, d)`
pub fn w(variable: impl Into<String>, value: impl ToString) -> TokenOp {
    TokenOp {
        kind: OpKind::Write,
        variable: variable.into(),
        value: value.to_string(),
    }
}

/// Identifies an event by its thread (0-based, in first-appearance order)
/// and its position inside that thread.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventRef {
    pub thread: usize,
    pub index: usize,
}

impl EventRef {
    pub fn new(thread: usize, index: usize) -> Self {
        EventRef { thread, index }
    }
}

impl fmt::Display for EventRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.thread + 1, self.index)
    }
}

/// A concurrent program: `k` non-empty threads of memory operations.
///
/// Variables and values are interned in thread-major order, so two programs
/// with the same threads compare equal regardless of how they were built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    labels: Vec<String>,
    threads: Vec<Vec<Operation>>,
    variables: Vec<String>,
    values: Vec<String>,
}

impl Program {
    pub fn builder() -> ProgramBuilder {
        ProgramBuilder::default()
    }

    pub fn num_threads(&self) -> usize {
        self.threads.len()
    }

    pub fn num_events(&self) -> usize {
        self.threads.iter().map(Vec::len).sum()
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_values(&self) -> usize {
        self.values.len()
    }

    pub fn thread(&self, thread: usize) -> &[Operation] {
        &self.threads[thread]
    }

    pub fn threads(&self) -> &[Vec<Operation>] {
        &self.threads
    }

    pub fn thread_len(&self, thread: usize) -> usize {
        self.threads[thread].len()
    }

    pub fn label(&self, thread: usize) -> &str {
        &self.labels[thread]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn thread_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn var_name(&self, var: VarId) -> &str {
        &self.variables[var.0 as usize]
    }

    pub fn value_name(&self, value: ValueId) -> &str {
        &self.values[value.0 as usize]
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.variables
            .iter()
            .position(|v| v == name)
            .map(|i| VarId(i as u32))
    }

    pub fn value_id(&self, name: &str) -> Option<ValueId> {
        self.values
            .iter()
            .position(|v| v == name)
            .map(|i| ValueId(i as u32))
    }

    pub fn contains(&self, event: EventRef) -> bool {
        event.thread < self.threads.len() && event.index < self.threads[event.thread].len()
    }

    /// Panics if `event` is not part of the program.
    pub fn op(&self, event: EventRef) -> Operation {
        self.threads[event.thread][event.index]
    }

    pub fn is_last(&self, event: EventRef) -> bool {
        event.index + 1 == self.threads[event.thread].len()
    }

    /// All events in thread-major order.
    pub fn events(&self) -> impl Iterator<Item = EventRef> + '_ {
        self.threads
            .iter()
            .enumerate()
            .flat_map(|(t, ops)| (0..ops.len()).map(move |i| EventRef::new(t, i)))
    }

    pub fn token_op(&self, op: Operation) -> TokenOp {
        TokenOp {
            kind: op.kind,
            variable: self.var_name(op.var).to_string(),
            value: self.value_name(op.value).to_string(),
        }
    }

    /// Renders an event as `label:r(x,d)`.
    pub fn describe(&self, event: EventRef) -> String {
        let op = self.op(event);
        format!(
            "{}:{}({},{})",
            self.label(event.thread),
            op.kind.mnemonic(),
            self.var_name(op.var),
            self.value_name(op.value)
        )
    }

    /// Rebuilds the program with a different thread order. Used by tests that
    /// check thread-permutation symmetry.
    pub fn permute_threads(&self, order: &[usize]) -> Program {
        let mut b = Program::builder();
        for &t in order {
            b = b.thread(
                self.labels[t].clone(),
                self.threads[t].iter().map(|&op| self.token_op(op)),
            );
        }
        b.build().expect("permutation of a valid program is valid")
    }
}

/// Writes the program in the line-oriented trace format, thread by thread.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, ops) in self.threads.iter().enumerate() {
            for op in ops {
                writeln!(
                    f,
                    "{}: {} {} {}",
                    self.labels[t],
                    op.kind.mnemonic(),
                    self.var_name(op.var),
                    self.value_name(op.value)
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Default, Debug, Clone)]
pub struct ProgramBuilder {
    threads: Vec<(String, Vec<TokenOp>)>,
}

impl ProgramBuilder {
    pub fn thread<I>(mut self, label: impl Into<String>, ops: I) -> Self
    where
        I: IntoIterator<Item = TokenOp>,
    {
        self.threads.push((label.into(), ops.into_iter().collect()));
        self
    }

    pub fn push_thread(&mut self, label: impl Into<String>, ops: Vec<TokenOp>) {
        self.threads.push((label.into(), ops));
    }

    pub fn build(self) -> Result<Program, TraceError> {
        if self.threads.is_empty() {
            return Err(TraceError::EmptyInput);
        }
        let mut labels = Vec::with_capacity(self.threads.len());
        let mut threads = Vec::with_capacity(self.threads.len());
        let mut var_ids: HashMap<String, VarId> = HashMap::new();
        let mut value_ids: HashMap<String, ValueId> = HashMap::new();
        let mut variables = Vec::new();
        let mut values = Vec::new();

        for (label, ops) in self.threads {
            if !is_token(&label) {
                return Err(TraceError::InvalidLabel(label));
            }
            if labels.contains(&label) {
                return Err(TraceError::DuplicateThread(label));
            }
            if ops.is_empty() {
                return Err(TraceError::EmptyThread(label));
            }
            let mut interned = Vec::with_capacity(ops.len());
            for op in ops {
                if !is_token(&op.variable) || !is_token(&op.value) {
                    return Err(TraceError::InvalidToken {
                        thread: label,
                        variable: op.variable,
                        value: op.value,
                    });
                }
                let var = *var_ids.entry(op.variable.clone()).or_insert_with(|| {
                    variables.push(op.variable.clone());
                    VarId(variables.len() as u32 - 1)
                });
                let value = *value_ids.entry(op.value.clone()).or_insert_with(|| {
                    values.push(op.value.clone());
                    ValueId(values.len() as u32 - 1)
                });
                interned.push(Operation {
                    kind: op.kind,
                    var,
                    value,
                });
            }
            labels.push(label);
            threads.push(interned);
        }

        Ok(Program {
            labels,
            threads,
            variables,
            values,
        })
    }
}

/// Tokens must survive a round trip through the whitespace-separated format.
fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || c == ':' || c == '#')
}
