use super::Process;

const SUM: u8 = 0;
const PAR: u8 = 1;
const UNARY: u8 = 2;
const ATOM: u8 = 3;

/// The α-canonical printed form. Two α-equivalent terms print identically.
pub fn format_process(p: &Process) -> String {
    print(&p.canonicalize())
}

pub(super) fn print(p: &Process) -> String {
    let mut out = String::new();
    write(p, SUM, &mut out);
    out
}

fn level(p: &Process) -> u8 {
    match p {
        Process::Sum(..) => SUM,
        Process::Par(..) => PAR,
        Process::Prefix(..) | Process::Restrict(..) | Process::Rename(..) => UNARY,
        Process::Nil | Process::Call(..) => ATOM,
    }
}

fn write(p: &Process, ctx: u8, out: &mut String) {
    if level(p) < ctx {
        out.push('(');
        write(p, SUM, out);
        out.push(')');
        return;
    }
    match p {
        Process::Nil => out.push('0'),
        Process::Call(name, args) => {
            out.push_str(name);
            if !args.is_empty() {
                let args: Vec<&str> = args.iter().map(|a| a.as_str()).collect();
                out.push('(');
                out.push_str(&args.join(", "));
                out.push(')');
            }
        }
        Process::Sum(l, r) => {
            write(l, SUM, out);
            out.push_str(" + ");
            write(r, PAR, out);
        }
        Process::Par(l, r) => {
            write(l, PAR, out);
            out.push_str(" | ");
            write(r, UNARY, out);
        }
        Process::Prefix(label, cont) => {
            out.push_str(&label.to_string());
            out.push_str(" . ");
            write(cont, UNARY, out);
        }
        Process::Restrict(a, body) => {
            out.push_str("new ");
            out.push_str(a.as_str());
            let mut body = body;
            while let Process::Restrict(b, inner) = &**body {
                out.push_str(", ");
                out.push_str(b.as_str());
                body = inner;
            }
            out.push_str(" in ");
            write(body, UNARY, out);
        }
        Process::Rename(body, phi) => {
            if matches!(**body, Process::Rename(..)) {
                write(body, UNARY, out);
            } else {
                write(body, ATOM, out);
            }
            out.push_str(&phi.to_string());
        }
    }
}
