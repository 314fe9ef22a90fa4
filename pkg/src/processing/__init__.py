# Vector file I/O and synthetic corpora
