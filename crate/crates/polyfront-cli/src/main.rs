fn main() {
    // Placeholder until the pipeline lands; replaced by the clap driver.
}
