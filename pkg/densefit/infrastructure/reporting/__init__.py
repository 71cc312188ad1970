# Report writers
