//! Objective backed by a child process speaking a line protocol: one line
//! of space-separated coordinates out, one line holding the value back.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use crate::error::ObjectiveError;
use crate::problem::Objective;

#[derive(Debug)]
struct Channel {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

/// A child process evaluated one point at a time.
#[derive(Debug)]
pub struct ExternalObjective {
    command: String,
    channel: Mutex<Channel>,
}

impl ExternalObjective {
    /// Start `command` through `sh -c`.
    pub fn spawn(command: &str) -> Result<Self, ObjectiveError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().ok_or(ObjectiveError::ChildExited)?;
        let stdout = BufReader::new(child.stdout.take().ok_or(ObjectiveError::ChildExited)?);
        Ok(Self {
            command: command.to_string(),
            channel: Mutex::new(Channel {
                child,
                stdin,
                stdout,
            }),
        })
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    /// Process id of the child, for supervision.
    pub fn id(&self) -> u32 {
        self.channel.lock().unwrap_or_else(|e| e.into_inner()).child.id()
    }
}

fn broken(e: std::io::Error) -> ObjectiveError {
    if e.kind() == ErrorKind::BrokenPipe {
        ObjectiveError::ChildExited
    } else {
        ObjectiveError::Io(e)
    }
}

impl Objective for ExternalObjective {
    fn value(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        let mut ch = self.channel.lock().unwrap_or_else(|e| e.into_inner());
        let mut line = String::new();
        for (i, v) in x.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            let _ = write!(line, "{v}");
        }
        line.push('\n');
        ch.stdin.write_all(line.as_bytes()).map_err(broken)?;
        ch.stdin.flush().map_err(broken)?;

        let mut reply = String::new();
        if ch.stdout.read_line(&mut reply).map_err(broken)? == 0 {
            return Err(ObjectiveError::ChildExited);
        }
        let text = reply.trim();
        let protocol = |reason: &str| ObjectiveError::Protocol {
            line: text.to_string(),
            reason: reason.to_string(),
        };
        let value: f64 = text.parse().map_err(|_| protocol("not a number"))?;
        if !value.is_finite() {
            return Err(protocol("value is not finite"));
        }
        Ok(value)
    }
}

impl Drop for ExternalObjective {
    fn drop(&mut self) {
        let ch = self.channel.get_mut().unwrap_or_else(|e| e.into_inner());
        let _ = ch.child.kill();
        let _ = ch.child.wait();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SUM: &str =
        r#"while read -r l; do echo "$l" | awk '{s=0; for(i=1;i<=NF;i++) s+=$i; print s}'; done"#;

    #[test]
    fn sums_inputs() {
        let obj = ExternalObjective::spawn(SUM).unwrap();
        assert_eq!(obj.value(&[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(obj.value(&[-0.5, 0.25]).unwrap(), -0.25);
    }

    #[test]
    fn non_numeric_reply_is_protocol_error() {
        let obj = ExternalObjective::spawn("while read -r l; do echo oops; done").unwrap();
        match obj.value(&[1.0]) {
            Err(ObjectiveError::Protocol { line, .. }) => assert_eq!(line, "oops"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exited_child_is_reported() {
        let obj = ExternalObjective::spawn("true").unwrap();
        std::thread::sleep(std::time::Duration::from_millis(50));
        assert!(matches!(
            obj.value(&[1.0]),
            Err(ObjectiveError::ChildExited)
        ));
    }
}
