# ghzwl: tripartite-separability witnesses for four-qubit GHZ-diagonal states
__version__ = "0.1.0"
