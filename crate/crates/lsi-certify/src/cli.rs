// placeholder
use crate::error::Result;

pub fn run_from_args(_args: &[String]) -> Result<i32> {
    Ok(0)
}
