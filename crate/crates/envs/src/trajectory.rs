//! Step-by-step trajectory logging for debugging rollouts.
//!
//! Records go to any [`std::io::Write`] sink as comma-separated text with a
//! header row, one record per environment step. Floats use Rust's default
//! shortest-roundtrip formatting, so repeated runs of a deterministic policy
//! produce byte-identical files.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{EnvError, Result};

/// Streams `(episode, step, state, action, reward, done)` records as CSV.
pub struct TrajectoryWriter<W: Write> {
    sink: W,
    state_dim: usize,
}

impl<W: Write> TrajectoryWriter<W> {
    /// Writes the header row immediately; `state_dim` fixes the number of
    /// state columns for the lifetime of the writer.
    pub fn new(mut sink: W, state_dim: usize) -> io::Result<Self> {
        let mut header = String::from("episode,step");
        for i in 0..state_dim {
            write!(header, ",s{i}").expect("writing to a String cannot fail");
        }
        header.push_str(",action_x,action_y,reward,done\n");
        sink.write_all(header.as_bytes())?;
        Ok(Self { sink, state_dim })
    }

    pub fn record(
        &mut self,
        episode: u64,
        step: u32,
        state: &[f64],
        action: [f64; 2],
        reward: f64,
        done: bool,
    ) -> Result<()> {
        if state.len() != self.state_dim {
            return Err(EnvError::InvalidConfig(format!(
                "trajectory record has {} state values, writer expects {}",
                state.len(),
                self.state_dim
            )));
        }
        let mut line = format!("{episode},{step}");
        for v in state {
            write!(line, ",{v}").expect("writing to a String cannot fail");
        }
        write!(line, ",{},{},{},{}", action[0], action[1], reward, u8::from(done))
            .expect("writing to a String cannot fail");
        line.push('\n');
        self.sink.write_all(line.as_bytes()).map_err(EnvError::from)
    }

    /// Flushes and returns the underlying sink.
    pub fn finish(mut self) -> io::Result<W> {
        self.sink.flush()?;
        Ok(self.sink)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows_are_comma_separated() {
        let mut writer = TrajectoryWriter::new(Vec::new(), 3).unwrap();
        writer.record(0, 0, &[0.5, -1.0, 0.25], [0.05, 0.0], -0.05, false).unwrap();
        writer.record(0, 1, &[0.5, -1.0, 0.25], [0.0, 0.05], 1.0, true).unwrap();
        let text = String::from_utf8(writer.finish().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "episode,step,s0,s1,s2,action_x,action_y,reward,done");
        assert_eq!(lines[1], "0,0,0.5,-1,0.25,0.05,0,-0.05,0");
        assert_eq!(lines[2], "0,1,0.5,-1,0.25,0,0.05,1,1");
    }

    #[test]
    fn wrong_state_width_is_rejected() {
        let mut writer = TrajectoryWriter::new(Vec::new(), 4).unwrap();
        let err = writer.record(0, 0, &[1.0, 2.0], [0.0, 0.0], 0.0, false).unwrap_err();
        assert!(matches!(err, EnvError::InvalidConfig(_)));
    }

    #[test]
    fn identical_inputs_produce_identical_bytes() {
        let write_once = || {
            let mut writer = TrajectoryWriter::new(Vec::new(), 2).unwrap();
            for step in 0..5u32 {
                let x = f64::from(step) * 0.3 - 0.7;
                writer.record(1, step, &[x, x * x], [x, -x], x.sin(), step == 4).unwrap();
            }
            writer.finish().unwrap()
        };
        assert_eq!(write_once(), write_once());
    }
}
