# Qubit states and channels in the Bloch-ball picture

