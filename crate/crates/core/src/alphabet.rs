//! Symbols, alphabets and words.
//!
//! Symbols are interned: machines and oracles work with [`Input`] and
//! [`Output`] indices into an [`Alphabet`], never with names. Alphabet order is
//! declaration order with the reserved symbols last, and every enumeration in
//! the crate (BFS, suffix generation, counterexample search) follows it.

use std::collections::HashSet;
use std::fmt;

use crate::error::Error;

/// The input reserved for "let time pass and report the next callback".
pub const WAIT: &str = "wait";
/// Output of `wait` when no callback is pending.
pub const QUIET: &str = "quiet";
/// Dummy acknowledgement output of an enabled callin.
pub const LAMBDA: &str = "lambda";
/// Output of a disabled callin, and of everything after it.
pub const ERR: &str = "err";
/// Output of every input after a learning purpose has been left.
pub const OOP: &str = "oop";

pub const RESERVED: [&str; 5] = [WAIT, QUIET, LAMBDA, ERR, OOP];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Input(pub u16);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Output(pub u16);

impl Input {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Output {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite sequence of inputs.
pub type Word = Vec<Input>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Input,
    Output,
    Reserved,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    name: String,
    kind: SymbolKind,
}

impl Symbol {
    /// A user-declared symbol. Reserved and empty names are rejected.
    pub fn user(name: &str, kind: SymbolKind) -> Result<Self, Error> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidSymbol(name.to_string()));
        }
        if is_reserved(name) || kind == SymbolKind::Reserved {
            return Err(Error::ReservedSymbol(name.to_string()));
        }
        Ok(Symbol {
            name: name.to_string(),
            kind,
        })
    }

    fn reserved(name: &str) -> Self {
        Symbol {
            name: name.to_string(),
            kind: SymbolKind::Reserved,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Ordered input and output alphabets of a Mealy machine.
///
/// A *closed* alphabet is the synchronous closure of a callin/callback
/// alphabet: `wait` is appended to the inputs and `quiet`, `lambda`, `err`
/// (and `oop` when a learning purpose is in play) to the outputs. A *plain*
/// alphabet carries no reserved symbols and is used for generic machines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    inputs: Vec<Symbol>,
    outputs: Vec<Symbol>,
    wait: Option<Input>,
    quiet: Option<Output>,
    lambda: Option<Output>,
    err: Option<Output>,
    oop: Option<Output>,
}

impl Alphabet {
    pub fn plain<I, O>(inputs: I, outputs: O) -> Result<Self, Error>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
        O: IntoIterator,
        O::Item: AsRef<str>,
    {
        let inputs = user_symbols(inputs, SymbolKind::Input)?;
        let outputs = user_symbols(outputs, SymbolKind::Output)?;
        check_disjoint(&inputs, &outputs)?;
        if inputs.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Alphabet {
            inputs,
            outputs,
            wait: None,
            quiet: None,
            lambda: None,
            err: None,
            oop: None,
        })
    }

    pub fn closed<I, O>(callins: I, callbacks: O) -> Result<Self, Error>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
        O: IntoIterator,
        O::Item: AsRef<str>,
    {
        Self::build_closed(callins, callbacks, false)
    }

    /// Closed alphabet extended with the out-of-purpose output.
    pub fn closed_with_oop<I, O>(callins: I, callbacks: O) -> Result<Self, Error>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
        O: IntoIterator,
        O::Item: AsRef<str>,
    {
        Self::build_closed(callins, callbacks, true)
    }

    fn build_closed<I, O>(callins: I, callbacks: O, oop: bool) -> Result<Self, Error>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
        O: IntoIterator,
        O::Item: AsRef<str>,
    {
        let mut inputs = user_symbols(callins, SymbolKind::Input)?;
        let mut outputs = user_symbols(callbacks, SymbolKind::Output)?;
        check_disjoint(&inputs, &outputs)?;
        let wait = Input(inputs.len() as u16);
        inputs.push(Symbol::reserved(WAIT));
        let base = outputs.len() as u16;
        outputs.push(Symbol::reserved(QUIET));
        outputs.push(Symbol::reserved(LAMBDA));
        outputs.push(Symbol::reserved(ERR));
        let oop = oop.then(|| {
            outputs.push(Symbol::reserved(OOP));
            Output(base + 3)
        });
        Ok(Alphabet {
            inputs,
            outputs,
            wait: Some(wait),
            quiet: Some(Output(base)),
            lambda: Some(Output(base + 1)),
            err: Some(Output(base + 2)),
            oop,
        })
    }

    /// The same alphabet with `oop` appended (no-op if already present).
    pub fn with_oop(&self) -> Result<Self, Error> {
        if self.oop.is_some() {
            return Ok(self.clone());
        }
        if !self.is_closed() {
            return Err(Error::NotClosed);
        }
        Self::closed_with_oop(self.callin_names(), self.callback_names())
    }

    pub fn is_closed(&self) -> bool {
        self.wait.is_some()
    }

    pub fn inputs(&self) -> &[Symbol] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Symbol] {
        &self.outputs
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn input_ids(&self) -> impl Iterator<Item = Input> + Clone {
        (0..self.inputs.len() as u16).map(Input)
    }

    pub fn output_ids(&self) -> impl Iterator<Item = Output> + Clone {
        (0..self.outputs.len() as u16).map(Output)
    }

    /// User-declared inputs (all inputs except `wait`).
    pub fn callin_names(&self) -> Vec<&str> {
        self.inputs
            .iter()
            .filter(|s| s.kind == SymbolKind::Input)
            .map(Symbol::name)
            .collect()
    }

    /// User-declared outputs (all outputs except the reserved ones).
    pub fn callback_names(&self) -> Vec<&str> {
        self.outputs
            .iter()
            .filter(|s| s.kind == SymbolKind::Output)
            .map(Symbol::name)
            .collect()
    }

    pub fn input(&self, name: &str) -> Result<Input, Error> {
        self.inputs
            .iter()
            .position(|s| s.name == name)
            .map(|i| Input(i as u16))
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn output(&self, name: &str) -> Result<Output, Error> {
        self.outputs
            .iter()
            .position(|s| s.name == name)
            .map(|i| Output(i as u16))
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn input_name(&self, i: Input) -> &str {
        &self.inputs[i.index()].name
    }

    pub fn output_name(&self, o: Output) -> &str {
        &self.outputs[o.index()].name
    }

    pub fn wait(&self) -> Option<Input> {
        self.wait
    }
    pub fn quiet(&self) -> Option<Output> {
        self.quiet
    }
    pub fn lambda(&self) -> Option<Output> {
        self.lambda
    }
    pub fn err(&self) -> Option<Output> {
        self.err
    }
    pub fn oop(&self) -> Option<Output> {
        self.oop
    }

    /// `err` and `oop`: outputs after which every output repeats the same symbol.
    pub fn is_absorbing(&self, o: Output) -> bool {
        Some(o) == self.err || Some(o) == self.oop
    }

    pub fn is_callback(&self, o: Output) -> bool {
        self.outputs[o.index()].kind == SymbolKind::Output
    }

    pub fn contains_input(&self, i: Input) -> bool {
        i.index() < self.inputs.len()
    }

    /// Parse a whitespace- or comma-separated list of input names.
    pub fn parse_word(&self, text: &str) -> Result<Word, Error> {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| self.input(s))
            .collect()
    }

    pub fn word_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Word, Error> {
        names.iter().map(|n| self.input(n.as_ref())).collect()
    }

    pub fn input_names(&self, w: &[Input]) -> Vec<String> {
        w.iter().map(|&i| self.input_name(i).to_string()).collect()
    }

    pub fn output_names(&self, w: &[Output]) -> Vec<String> {
        w.iter().map(|&o| self.output_name(o).to_string()).collect()
    }

    pub fn format_word(&self, w: &[Input]) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        self.input_names(w).join(" ")
    }

    /// Interleave a query with its answer: `i0 o0 i1 o1 ...`.
    pub fn format_trace(&self, w: &[Input], out: &[Output]) -> String {
        w.iter()
            .zip(out)
            .map(|(&i, &o)| format!("{} {}", self.input_name(i), self.output_name(o)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn user_symbols<I>(names: I, kind: SymbolKind) -> Result<Vec<Symbol>, Error>
where
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for name in names {
        let name = name.as_ref();
        if !seen.insert(name.to_string()) {
            return Err(Error::DuplicateSymbol(name.to_string()));
        }
        out.push(Symbol::user(name, kind)?);
    }
    Ok(out)
}

fn check_disjoint(inputs: &[Symbol], outputs: &[Symbol]) -> Result<(), Error> {
    let names: HashSet<&str> = inputs.iter().map(Symbol::name).collect();
    match outputs.iter().find(|s| names.contains(s.name())) {
        Some(s) => Err(Error::DuplicateSymbol(s.name().to_string())),
        None => Ok(()),
    }
}

/// All words over `n` inputs of length exactly `len`, in lexicographic order.
pub fn words_of_length(n: usize, len: usize) -> impl Iterator<Item = Word> {
    let total = (n as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    let mut current = vec![Input(0); len];
    let mut produced = 0u128;
    std::iter::from_fn(move || {
        if produced >= total || n == 0 && len > 0 {
            return None;
        }
        let item = current.clone();
        produced += 1;
        for pos in (0..len).rev() {
            if current[pos].index() + 1 < n {
                current[pos].0 += 1;
                break;
            }
            current[pos] = Input(0);
        }
        Some(item)
    })
}

/// All words of length `0..=max_len` ordered by length, then lexicographically.
pub fn words_up_to(n: usize, max_len: usize) -> impl Iterator<Item = Word> {
    (0..=max_len).flat_map(move |len| words_of_length(n, len))
}
