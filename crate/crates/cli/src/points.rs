/// Parses `a:b:n` (n equispaced samples including both ends) or `x1,x2,...`.
pub fn parse_points(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("malformed point {s:?} in {text:?}"))
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("range {text:?} must look like a:b:n"));
        };
        let (a, b) = (parse(a)?, parse(b)?);
        let n: usize = n
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("sample count in {text:?} must be a positive integer"))?;
        if n == 1 {
            return Ok(vec![a]);
        }
        return Ok((0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect());
    }
    if text.is_empty() {
        return Err("empty points list".into());
    }
    text.split(',').map(parse).collect()
}
