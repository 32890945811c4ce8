//! OpenQASM 2.0 emission and subset parsing.
//!
//! The emitted statement set is {x, h, cx, u1, u3, measure, barrier}.
//! Richer circuit ops are lowered first: anti-controls become X-conjugated
//! controls, CU1/CPHASE and CU3 expand into their exact cx + u1/u3
//! realizations. Angles are printed with 17 significant digits so parsing
//! recovers every f64 bit-exactly; `parse(emit(c))` is op-identical for any
//! circuit already inside the emission subset.

use crate::circuit::{Circuit, Op, OpKind};
use crate::error::{Error, Result};

/// Lower a circuit to the emission subset {X, H, CNOT, U1, U3, barrier,
/// measure}. Exact (not just projective): the expansions carry their phases
/// on the control qubit.
pub fn lower_for_emission(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.n_qubits());
    for (index, op) in circuit.ops().iter().enumerate() {
        lower_op(op, &mut out).map_err(|e| match e {
            Error::Capability(msg) => Error::QasmEmission { index, msg },
            other => other,
        })?;
    }
    Ok(out)
}

fn lower_op(op: &Op, out: &mut Circuit) -> Result<()> {
    if op.controls.len() > 1 {
        return Err(Error::Capability(format!(
            "{} with {} controls is outside the closed gate set",
            op.kind,
            op.controls.len()
        )));
    }
    if op.control_on_zero {
        let c = op.controls[0];
        out.push(Op::x(c))?;
        let mut positive = op.clone();
        positive.control_on_zero = false;
        lower_op(&positive, out)?;
        out.push(Op::x(c))?;
        return Ok(());
    }
    match op.kind {
        OpKind::X | OpKind::H | OpKind::U1 | OpKind::U3 | OpKind::Cnot | OpKind::Barrier
        | OpKind::Measure => out.push(op.clone()),
        OpKind::Cu1 | OpKind::Cphase => {
            // qelib1 cu1: exact controlled phase.
            let lam = op.params[0];
            let (c, t) = (op.controls[0], op.targets[0]);
            out.push_all([
                Op::u1(lam / 2.0, c),
                Op::cnot(c, t),
                Op::u1(-lam / 2.0, t),
                Op::cnot(c, t),
                Op::u1(lam / 2.0, t),
            ])
        }
        OpKind::Cu3 => {
            // qelib1 cu3: exact controlled u3.
            let (theta, phi, lam) = (op.params[0], op.params[1], op.params[2]);
            let (c, t) = (op.controls[0], op.targets[0]);
            out.push_all([
                Op::u1((lam + phi) / 2.0, c),
                Op::u1((lam - phi) / 2.0, t),
                Op::cnot(c, t),
                Op::u3(-theta / 2.0, 0.0, -(phi + lam) / 2.0, t),
                Op::cnot(c, t),
                Op::u3(theta / 2.0, phi, 0.0, t),
            ])
        }
    }
}

/// 17-significant-digit angle rendering; round-trips every f64.
fn fmt_angle(x: f64) -> String {
    format!("{x:.16e}")
}

/// Emit OpenQASM 2.0 text. The creg declaration appears only when the
/// circuit contains measurements.
pub fn emit_qasm(circuit: &Circuit) -> Result<String> {
    let lowered = lower_for_emission(circuit)?;
    let n = lowered.n_qubits();
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    out.push_str("include \"qelib1.inc\";\n");
    out.push_str(&format!("qreg q[{n}];\n"));
    if lowered.ops().iter().any(|op| op.kind == OpKind::Measure) {
        out.push_str(&format!("creg c[{n}];\n"));
    }
    for op in lowered.ops() {
        match op.kind {
            OpKind::X => out.push_str(&format!("x q[{}];\n", op.targets[0])),
            OpKind::H => out.push_str(&format!("h q[{}];\n", op.targets[0])),
            OpKind::Cnot => out.push_str(&format!(
                "cx q[{}],q[{}];\n",
                op.controls[0], op.targets[0]
            )),
            OpKind::U1 => out.push_str(&format!(
                "u1({}) q[{}];\n",
                fmt_angle(op.params[0]),
                op.targets[0]
            )),
            OpKind::U3 => out.push_str(&format!(
                "u3({},{},{}) q[{}];\n",
                fmt_angle(op.params[0]),
                fmt_angle(op.params[1]),
                fmt_angle(op.params[2]),
                op.targets[0]
            )),
            OpKind::Barrier => {
                let args: Vec<String> = op.targets.iter().map(|q| format!("q[{q}]")).collect();
                out.push_str(&format!("barrier {};\n", args.join(",")));
            }
            OpKind::Measure => out.push_str(&format!(
                "measure q[{}] -> c[{}];\n",
                op.targets[0], op.targets[1]
            )),
            OpKind::Cu1 | OpKind::Cu3 | OpKind::Cphase => {
                unreachable!("lowering removed controlled-parameter gates")
            }
        }
    }
    Ok(out)
}

/// A parsed document: the declarations plus the gate statements in order.
#[derive(Debug, Clone, PartialEq)]
pub struct QasmDocument {
    pub qreg_name: String,
    pub n_qubits: usize,
    pub creg_name: Option<String>,
    pub n_cbits: usize,
    pub circuit: Circuit,
}

/// Parse text in the emitted subset grammar into a circuit with the
/// identical op sequence.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    Ok(parse_qasm_document(text)?.circuit)
}

pub fn parse_qasm_document(text: &str) -> Result<QasmDocument> {
    let tokens = lex(text)?;
    Parser { tokens, pos: 0 }.document()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Arrow,
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Str(s) => write!(f, "string \"{s}\""),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }
    loop {
        let (tline, tcol) = (line, col);
        let Some(&c) = chars.peek() else {
            tokens.push(Token { tok: Tok::Eof, line, col });
            return Ok(tokens);
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '/' => {
                bump!();
                if chars.peek() == Some(&'/') {
                    while let Some(&n) = chars.peek() {
                        if n == '\n' {
                            break;
                        }
                        bump!();
                    }
                } else {
                    return Err(Error::QasmSyntax {
                        line: tline,
                        col: tcol,
                        msg: "stray `/` (expressions are not supported in the subset)".into(),
                    });
                }
            }
            '(' => {
                bump!();
                tokens.push(Token { tok: Tok::LParen, line: tline, col: tcol });
            }
            ')' => {
                bump!();
                tokens.push(Token { tok: Tok::RParen, line: tline, col: tcol });
            }
            '[' => {
                bump!();
                tokens.push(Token { tok: Tok::LBracket, line: tline, col: tcol });
            }
            ']' => {
                bump!();
                tokens.push(Token { tok: Tok::RBracket, line: tline, col: tcol });
            }
            ',' => {
                bump!();
                tokens.push(Token { tok: Tok::Comma, line: tline, col: tcol });
            }
            ';' => {
                bump!();
                tokens.push(Token { tok: Tok::Semi, line: tline, col: tcol });
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    tokens.push(Token { tok: Tok::Arrow, line: tline, col: tcol });
                } else {
                    // Negative number literal.
                    let mut s = String::from("-");
                    lex_number_tail(&mut chars, &mut s, &mut line, &mut col, tline, tcol)?;
                    tokens.push(Token { tok: Tok::Number(s), line: tline, col: tcol });
                }
            }
            '+' => {
                bump!();
                let mut s = String::new();
                lex_number_tail(&mut chars, &mut s, &mut line, &mut col, tline, tcol)?;
                tokens.push(Token { tok: Tok::Number(s), line: tline, col: tcol });
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                        None => {
                            return Err(Error::QasmSyntax {
                                line: tline,
                                col: tcol,
                                msg: "unterminated string".into(),
                            })
                        }
                    }
                }
                tokens.push(Token { tok: Tok::Str(s), line: tline, col: tcol });
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut s = String::new();
                lex_number_tail(&mut chars, &mut s, &mut line, &mut col, tline, tcol)?;
                tokens.push(Token { tok: Tok::Number(s), line: tline, col: tcol });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&n) = chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        s.push(n);
                        bump!();
                    } else {
                        break;
                    }
                }
                tokens.push(Token { tok: Tok::Ident(s), line: tline, col: tcol });
            }
            other => {
                return Err(Error::QasmSyntax {
                    line: tline,
                    col: tcol,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
}

fn lex_number_tail(
    chars: &mut std::iter::Peekable<std::str::Chars<'_>>,
    s: &mut String,
    line: &mut usize,
    col: &mut usize,
    tline: usize,
    tcol: usize,
) -> Result<()> {
    let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
        let c = chars.next();
        if c == Some('\n') {
            *line += 1;
            *col = 1;
        } else if c.is_some() {
            *col += 1;
        }
        c
    };
    let mut saw_digit = false;
    while let Some(&n) = chars.peek() {
        if n.is_ascii_digit() || n == '.' {
            saw_digit |= n.is_ascii_digit();
            s.push(n);
            bump(chars);
        } else if (n == 'e' || n == 'E') && saw_digit {
            s.push(n);
            bump(chars);
            if let Some(&sign) = chars.peek() {
                if sign == '+' || sign == '-' {
                    s.push(sign);
                    bump(chars);
                }
            }
        } else {
            break;
        }
    }
    if !saw_digit {
        return Err(Error::QasmSyntax {
            line: tline,
            col: tcol,
            msg: format!("malformed number `{s}`"),
        });
    }
    Ok(())
}

/// Gate names legal in full OpenQASM 2.0 / qelib1 but outside this subset.
const KNOWN_OUTSIDE_SUBSET: &[&str] = &[
    "u2", "u0", "id", "y", "z", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "cz", "cy", "ch",
    "ccx", "crz", "cu1", "cu3", "swap", "reset",
];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn next(&mut self) -> &Token {
        let i = self.pos.min(self.tokens.len() - 1);
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        &self.tokens[i]
    }

    fn expect(&mut self, want: &Tok) -> Result<()> {
        let got = self.next();
        if &got.tok == want {
            Ok(())
        } else {
            let (line, col, found) = (got.line, got.col, got.tok.clone());
            Err(Error::QasmSyntax {
                line,
                col,
                msg: format!("expected {want}, found {found}"),
            })
        }
    }

    fn expect_ident(&mut self) -> Result<(String, usize, usize)> {
        let got = self.next();
        match &got.tok {
            Tok::Ident(s) => Ok((s.clone(), got.line, got.col)),
            other => {
                let (line, col, found) = (got.line, got.col, other.clone());
                Err(Error::QasmSyntax {
                    line,
                    col,
                    msg: format!("expected identifier, found {found}"),
                })
            }
        }
    }

    fn expect_uint(&mut self) -> Result<usize> {
        let got = self.next();
        match &got.tok {
            Tok::Number(s) => s.parse::<usize>().map_err(|_| Error::QasmSyntax {
                line: got.line,
                col: got.col,
                msg: format!("expected a non-negative integer, found `{s}`"),
            }),
            other => {
                let (line, col, found) = (got.line, got.col, other.clone());
                Err(Error::QasmSyntax {
                    line,
                    col,
                    msg: format!("expected an integer, found {found}"),
                })
            }
        }
    }

    fn expect_angle(&mut self) -> Result<f64> {
        let got = self.next();
        match &got.tok {
            Tok::Number(s) => s.parse::<f64>().map_err(|_| Error::QasmSyntax {
                line: got.line,
                col: got.col,
                msg: format!("malformed angle `{s}`"),
            }),
            other => {
                let (line, col, found) = (got.line, got.col, other.clone());
                Err(Error::QasmSyntax {
                    line,
                    col,
                    msg: format!("expected an angle literal, found {found}"),
                })
            }
        }
    }

    /// `name[index]` referencing a declared register.
    fn expect_reg_arg(&mut self, name: &str, size: usize, what: &str) -> Result<usize> {
        let (got, line, col) = self.expect_ident()?;
        if got != name {
            return Err(Error::QasmSyntax {
                line,
                col,
                msg: format!("unknown {what} register `{got}` (declared: `{name}`)"),
            });
        }
        self.expect(&Tok::LBracket)?;
        let idx = self.expect_uint()?;
        if idx >= size {
            return Err(Error::QasmSyntax {
                line,
                col,
                msg: format!("index {idx} out of range for {what} register of size {size}"),
            });
        }
        self.expect(&Tok::RBracket)?;
        Ok(idx)
    }

    fn document(mut self) -> Result<QasmDocument> {
        // Header: OPENQASM 2.0;
        let (kw, line, col) = self.expect_ident()?;
        if kw != "OPENQASM" {
            return Err(Error::QasmSyntax {
                line,
                col,
                msg: format!("expected `OPENQASM`, found `{kw}`"),
            });
        }
        let version = self.next();
        match &version.tok {
            Tok::Number(v) if v == "2.0" => {}
            other => {
                let (line, col, found) = (version.line, version.col, other.clone());
                return Err(Error::QasmSyntax {
                    line,
                    col,
                    msg: format!("expected version 2.0, found {found}"),
                });
            }
        }
        self.expect(&Tok::Semi)?;

        let mut qreg: Option<(String, usize)> = None;
        let mut creg: Option<(String, usize)> = None;
        let mut ops: Vec<Op> = Vec::new();

        loop {
            let tok = self.next();
            let (line, col) = (tok.line, tok.col);
            let name = match &tok.tok {
                Tok::Eof => break,
                Tok::Ident(s) => s.clone(),
                other => {
                    let found = other.clone();
                    return Err(Error::QasmSyntax {
                        line,
                        col,
                        msg: format!("expected a statement, found {found}"),
                    });
                }
            };
            match name.as_str() {
                "include" => {
                    let inc = self.next();
                    match &inc.tok {
                        Tok::Str(_) => {}
                        other => {
                            let (line, col, found) = (inc.line, inc.col, other.clone());
                            return Err(Error::QasmSyntax {
                                line,
                                col,
                                msg: format!("expected an include path string, found {found}"),
                            });
                        }
                    }
                    self.expect(&Tok::Semi)?;
                }
                "qreg" | "creg" => {
                    let (reg_name, _, _) = self.expect_ident()?;
                    self.expect(&Tok::LBracket)?;
                    let size = self.expect_uint()?;
                    self.expect(&Tok::RBracket)?;
                    self.expect(&Tok::Semi)?;
                    if size == 0 {
                        return Err(Error::QasmSyntax {
                            line,
                            col,
                            msg: format!("register `{reg_name}` must have size >= 1"),
                        });
                    }
                    let slot = if name == "qreg" { &mut qreg } else { &mut creg };
                    if slot.is_some() {
                        return Err(Error::Capability(format!(
                            "line {line}: multiple {name} declarations are outside the subset"
                        )));
                    }
                    *slot = Some((reg_name, size));
                }
                "x" | "h" | "cx" | "u1" | "u3" | "barrier" | "measure" => {
                    let Some((qname, qsize)) = qreg.clone() else {
                        return Err(Error::QasmSyntax {
                            line,
                            col,
                            msg: "gate statement before any qreg declaration".into(),
                        });
                    };
                    let op = match name.as_str() {
                        "x" => Op::x(self.expect_reg_arg(&qname, qsize, "quantum")?),
                        "h" => Op::h(self.expect_reg_arg(&qname, qsize, "quantum")?),
                        "cx" => {
                            let c = self.expect_reg_arg(&qname, qsize, "quantum")?;
                            self.expect(&Tok::Comma)?;
                            let t = self.expect_reg_arg(&qname, qsize, "quantum")?;
                            Op::cnot(c, t)
                        }
                        "u1" => {
                            self.expect(&Tok::LParen)?;
                            let lam = self.expect_angle()?;
                            self.expect(&Tok::RParen)?;
                            Op::u1(lam, self.expect_reg_arg(&qname, qsize, "quantum")?)
                        }
                        "u3" => {
                            self.expect(&Tok::LParen)?;
                            let theta = self.expect_angle()?;
                            self.expect(&Tok::Comma)?;
                            let phi = self.expect_angle()?;
                            self.expect(&Tok::Comma)?;
                            let lam = self.expect_angle()?;
                            self.expect(&Tok::RParen)?;
                            Op::u3(theta, phi, lam, self.expect_reg_arg(&qname, qsize, "quantum")?)
                        }
                        "barrier" => {
                            let mut qs = vec![self.expect_reg_arg(&qname, qsize, "quantum")?];
                            while self.peek().tok == Tok::Comma {
                                self.next();
                                qs.push(self.expect_reg_arg(&qname, qsize, "quantum")?);
                            }
                            Op::barrier(qs)
                        }
                        "measure" => {
                            let q = self.expect_reg_arg(&qname, qsize, "quantum")?;
                            self.expect(&Tok::Arrow)?;
                            let Some((cname, csize)) = creg.clone() else {
                                return Err(Error::QasmSyntax {
                                    line,
                                    col,
                                    msg: "measure before any creg declaration".into(),
                                });
                            };
                            let cbit = self.expect_reg_arg(&cname, csize, "classical")?;
                            if cbit >= qsize {
                                return Err(Error::QasmSyntax {
                                    line,
                                    col,
                                    msg: format!(
                                        "classical bit {cbit} exceeds the qubit count {qsize} \
                                         (the subset ties classical bits to qubits)"
                                    ),
                                });
                            }
                            Op::measure(q, cbit)
                        }
                        _ => unreachable!(),
                    };
                    self.expect(&Tok::Semi)?;
                    ops.push(op);
                }
                other if KNOWN_OUTSIDE_SUBSET.contains(&other) => {
                    return Err(Error::Capability(format!(
                        "line {line}, column {col}: gate `{other}` is outside the supported \
                         subset {{x, h, cx, u1, u3, measure, barrier}}"
                    )));
                }
                "gate" | "opaque" | "if" => {
                    return Err(Error::Capability(format!(
                        "line {line}, column {col}: `{name}` statements are outside the \
                         supported subset"
                    )));
                }
                other => {
                    return Err(Error::QasmSyntax {
                        line,
                        col,
                        msg: format!("unknown statement `{other}`"),
                    });
                }
            }
        }

        let Some((qreg_name, n_qubits)) = qreg else {
            return Err(Error::QasmSyntax {
                line: 1,
                col: 1,
                msg: "missing qreg declaration".into(),
            });
        };
        let mut circuit = Circuit::new(n_qubits);
        circuit.push_all(ops)?;
        let (creg_name, n_cbits) = match creg {
            Some((n, s)) => (Some(n), s),
            None => (None, 0),
        };
        Ok(QasmDocument {
            qreg_name,
            n_qubits,
            creg_name,
            n_cbits,
            circuit,
        })
    }
}

/// Seeded generator over the emission subset; drives round-trip tests and
/// benchmarks.
pub fn random_subset_circuit(n_qubits: usize, n_ops: usize, seed: u64) -> Circuit {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n_qubits);
    let angle = |rng: &mut rand_chacha::ChaCha8Rng| rng.gen_range(-7.0..7.0);
    for _ in 0..n_ops {
        let q = rng.gen_range(0..n_qubits);
        let op = match rng.gen_range(0..5) {
            0 => Op::x(q),
            1 => Op::h(q),
            2 if n_qubits > 1 => {
                let mut t = rng.gen_range(0..n_qubits);
                while t == q {
                    t = rng.gen_range(0..n_qubits);
                }
                Op::cnot(q, t)
            }
            3 => Op::u1(angle(&mut rng), q),
            _ => Op::u3(angle(&mut rng), angle(&mut rng), angle(&mut rng), q),
        };
        c.push(op).expect("generated ops are valid");
    }
    c
}
