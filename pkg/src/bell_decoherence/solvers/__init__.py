"""
Solver Module
Contains one solver per concurrence method (analytic, qsba, cumulant2, montecarlo, markovian).
"""
